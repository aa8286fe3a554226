#include <doctest.h>

#include <algorithm>
#include <random>

#include "diagq/quality.hpp"
#include "test_support.hpp"

using namespace diagq::data;
using namespace diagq::quality;

namespace {

ResponseRecord rec(Id user, Id question, Id answer, int value, int correct) {
  return ResponseRecord{question, user, answer, value, correct, value == correct ? 1 : 0};
}

// Independent pair/match counter used to cross-check agreement_fraction.
double brute_force_agreement(const std::unordered_map<Id, int>& ranks,
                             const ExpertJudgments& judgments, Id expert) {
  const auto& votes = judgments.votes.at(expert);
  int matches = 0;
  for (std::size_t i = 0; i < judgments.pairs.size(); ++i) {
    Id preferred = ranks.at(judgments.pairs[i].left) < ranks.at(judgments.pairs[i].right)
                       ? judgments.pairs[i].left
                       : judgments.pairs[i].right;
    Id voted = votes[i] == ExpertJudgments::Choice::left ? judgments.pairs[i].left
                                                         : judgments.pairs[i].right;
    if (preferred == voted) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(judgments.pairs.size());
}

// 25 disjoint pairs (2i, 2i+1) under the identity ranking; expert e agrees on
// exactly match_counts[e] of them.
std::pair<QualityRanking, ExpertJudgments> agreement_fixture(
    const std::vector<int>& match_counts) {
  std::vector<Id> order;
  for (Id q = 0; q < 50; ++q) order.push_back(q);
  auto ranking = QualityRanking::from_order(order);

  ExpertJudgments judgments;
  for (Id i = 0; i < 25; ++i) judgments.pairs.push_back({2 * i, 2 * i + 1});
  for (std::size_t e = 0; e < match_counts.size(); ++e) {
    auto& votes = judgments.votes[static_cast<Id>(e + 1)];
    for (int i = 0; i < 25; ++i) {
      // The ranking always prefers the left (smaller-id) question.
      votes.push_back(i < match_counts[e] ? ExpertJudgments::Choice::left
                                          : ExpertJudgments::Choice::right);
    }
  }
  return {std::move(ranking), std::move(judgments)};
}

}  // namespace

TEST_CASE("choice_entropy reference values") {
  CHECK(choice_entropy({25, 25, 25, 25}) == doctest::Approx(2.0));
  CHECK(choice_entropy({100, 0, 0, 0}) == doctest::Approx(0.0));
  CHECK(choice_entropy({50, 50, 0, 0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(choice_entropy({0, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("choice_entropy is permutation-invariant and maximal at uniform") {
  std::mt19937_64 rng(61);
  for (int iter = 0; iter < 50; ++iter) {
    std::array<std::int64_t, 4> counts{};
    for (auto& c : counts) c = static_cast<std::int64_t>(rng() % 50);
    counts[0] += 1;  // keep the total positive
    double h = choice_entropy(counts);
    CHECK(h <= 2.0 + 1e-12);
    auto shuffled = counts;
    for (std::size_t i = 4; i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng() % i]);
    CHECK(choice_entropy(shuffled) == doctest::Approx(h));
    bool uniform = counts[0] == counts[1] && counts[1] == counts[2] && counts[2] == counts[3];
    if (!uniform) CHECK(h < 2.0 - 1e-12);
  }
}

TEST_CASE("correctness_entropy reference values") {
  CHECK(correctness_entropy(50, 50) == doctest::Approx(1.0));
  CHECK(correctness_entropy(100, 0) == doctest::Approx(0.0));
  // H(0.75) by hand.
  CHECK(correctness_entropy(75, 25) == doctest::Approx(0.8112781244591328));
  CHECK_THROWS_AS(correctness_entropy(0, 0), std::invalid_argument);
}

TEST_CASE("conditional entropy with a single cell equals the unconditional value") {
  std::unordered_map<Id, AnswerMeta> answers;
  std::vector<ResponseRecord> records;
  for (Id i = 0; i < 8; ++i) {
    records.push_back(rec(i, 0, i, i < 6 ? 1 : 2, 1));
    AnswerMeta meta;
    meta.answer_id = i;
    meta.group_id = 7;  // one group
    meta.quiz_id = static_cast<Id>(i % 2);
    answers[i] = meta;
  }
  auto by_group = conditional_correctness_entropy(records, answers, Condition::group);
  CHECK(by_group.at(0) == doctest::Approx(correctness_entropy(6, 2)));
}

TEST_CASE("conditioning on pure cells drives the entropy to zero") {
  std::unordered_map<Id, AnswerMeta> answers;
  std::vector<ResponseRecord> records;
  for (Id i = 0; i < 8; ++i) {
    bool in_first = i < 4;
    records.push_back(rec(i, 0, i, in_first ? 1 : 2, 1));  // group 0 all correct, group 1 all wrong
    AnswerMeta meta;
    meta.answer_id = i;
    meta.group_id = in_first ? 0 : 1;
    answers[i] = meta;
  }
  auto by_group = conditional_correctness_entropy(records, answers, Condition::group);
  CHECK(by_group.at(0) == doctest::Approx(0.0));
  CHECK(correctness_entropy(4, 4) == doctest::Approx(1.0));
}

TEST_CASE("cells with fewer than two answers are excluded") {
  std::unordered_map<Id, AnswerMeta> answers;
  std::vector<ResponseRecord> records;
  for (Id i = 0; i < 3; ++i) {
    records.push_back(rec(i, 0, i, 1, 1));
    AnswerMeta meta;
    meta.answer_id = i;
    meta.group_id = i < 2 ? 0 : 1;  // group 1 has a single answer
    answers[i] = meta;
  }
  auto by_group = conditional_correctness_entropy(records, answers, Condition::group);
  CHECK(by_group.at(0) == doctest::Approx(0.0));  // only the 2-answer cell contributes

  // Single-answer cells only: the question has no conditional value at all.
  std::vector<ResponseRecord> sparse{rec(0, 5, 100, 1, 1)};
  AnswerMeta meta;
  meta.answer_id = 100;
  meta.group_id = 0;
  answers[100] = meta;
  CHECK(conditional_correctness_entropy(sparse, answers, Condition::group).count(5) == 0);
}

TEST_CASE("conditional entropy throws on unresolvable answer metadata") {
  std::vector<ResponseRecord> records{rec(0, 0, 42, 1, 1)};
  std::unordered_map<Id, AnswerMeta> answers;
  CHECK_THROWS_AS(conditional_correctness_entropy(records, answers, Condition::group),
                  std::runtime_error);
}

TEST_CASE("conditioning never exceeds the unconditional entropy of the same records") {
  std::mt19937_64 rng(67);
  for (int iter = 0; iter < 40; ++iter) {
    std::unordered_map<Id, AnswerMeta> answers;
    std::vector<ResponseRecord> records;
    Id answer = 0;
    std::size_t n = 10 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i) {
      records.push_back(rec(static_cast<Id>(i), 0, answer, rng() % 2 == 0 ? 1 : 2, 1));
      AnswerMeta meta;
      meta.answer_id = answer;
      meta.group_id = static_cast<Id>(rng() % 4);
      answers[answer] = meta;
      ++answer;
    }
    auto conditional = conditional_correctness_entropy(records, answers, Condition::group);
    if (!conditional.count(0)) continue;

    // Unconditional entropy over the records of qualifying (>= 2 answer)
    // cells only: cells excluded from the weighted mean must not count here
    // either, otherwise Jensen's inequality does not apply.
    std::map<Id, std::pair<std::int64_t, std::int64_t>> cell_counts;
    for (const auto& r : records) {
      auto& [count, correct] = cell_counts[answers.at(r.answer_id).group_id];
      ++count;
      correct += r.is_correct;
    }
    std::int64_t total = 0, total_correct = 0;
    for (const auto& [_, counts] : cell_counts) {
      if (counts.first < 2) continue;
      total += counts.first;
      total_correct += counts.second;
    }
    REQUIRE(total > 0);
    double unconditional = correctness_entropy(total_correct, total - total_correct);
    CHECK(conditional.at(0) <= unconditional + 1e-9);
  }
}

TEST_CASE("mean_confidence averages present values and skips absent ones") {
  std::unordered_map<Id, AnswerMeta> answers;
  auto with_confidence = [&](Id answer_id, std::optional<int> confidence) {
    AnswerMeta meta;
    meta.answer_id = answer_id;
    meta.confidence = confidence;
    answers[answer_id] = meta;
  };
  with_confidence(0, 100);
  with_confidence(1, 100);
  with_confidence(2, 0);
  with_confidence(3, 100);
  with_confidence(4, std::nullopt);

  std::vector<ResponseRecord> records{rec(0, 10, 0, 1, 1), rec(1, 10, 1, 1, 1),
                                      rec(0, 11, 2, 1, 1), rec(1, 11, 3, 1, 1),
                                      rec(0, 12, 4, 1, 1)};
  auto means = mean_confidence(records, answers);
  CHECK(means.at(10) == doctest::Approx(100.0));
  CHECK(means.at(11) == doctest::Approx(50.0));
  CHECK(means.count(12) == 0);  // no confidence data at all
}

TEST_CASE("rank_by_feature ranks by value with id tie-breaks") {
  std::vector<Id> questions{1, 2};
  std::unordered_map<Id, double> values{{1, 0.9}, {2, 0.1}};
  auto ranking = rank_by_feature(questions, values, RankDirection::higher_is_better);
  CHECK(ranking.rank_of(1) == 1);
  CHECK(ranking.rank_of(2) == 2);

  auto inverted = rank_by_feature(questions, values, RankDirection::lower_is_better);
  CHECK(inverted.rank_of(2) == 1);

  std::vector<Id> tied{5, 3};
  std::unordered_map<Id, double> equal{{5, 0.5}, {3, 0.5}};
  auto tie_ranking = rank_by_feature(tied, equal, RankDirection::higher_is_better);
  CHECK(tie_ranking.rank_of(3) == 1);
  CHECK(tie_ranking.rank_of(5) == 2);
}

TEST_CASE("rank_by_feature places questions without a value after all valued ones") {
  std::vector<Id> questions{1, 2, 3, 4};
  std::unordered_map<Id, double> values{{2, 0.1}, {4, 0.9}};
  std::unordered_map<Id, double> fallback{{1, 0.2}, {3, 0.8}};
  auto ranking = rank_by_feature(questions, values, RankDirection::higher_is_better, &fallback);
  CHECK(ranking.rank_of(4) == 1);
  CHECK(ranking.rank_of(2) == 2);
  CHECK(ranking.rank_of(3) == 3);  // fallback orders the tail
  CHECK(ranking.rank_of(1) == 4);

  auto no_fallback = rank_by_feature(questions, values, RankDirection::higher_is_better);
  CHECK(no_fallback.rank_of(1) == 3);  // id order in the tail
  CHECK(no_fallback.rank_of(3) == 4);
}

TEST_CASE("every produced ranking is a bijection onto 1..N") {
  std::mt19937_64 rng(71);
  for (std::size_t n : {1ul, 7ul, 948ul}) {
    std::vector<Id> questions;
    std::unordered_map<Id, double> values;
    for (std::size_t i = 0; i < n; ++i) {
      questions.push_back(static_cast<Id>(i * 3));
      if (rng() % 5 != 0) values[static_cast<Id>(i * 3)] = static_cast<double>(rng() % 100) / 10.0;
    }
    auto ranking = rank_by_feature(questions, values, RankDirection::higher_is_better);
    REQUIRE(ranking.size() == n);
    std::vector<bool> seen(n, false);
    for (Id q : questions) {
      int rank = ranking.rank_of(q);
      REQUIRE(rank >= 1);
      REQUIRE(static_cast<std::size_t>(rank) <= n);
      CHECK(!seen[static_cast<std::size_t>(rank - 1)]);
      seen[static_cast<std::size_t>(rank - 1)] = true;
    }
  }
}

TEST_CASE("aggregate_ranks_mean") {
  auto single = QualityRanking::from_order({3, 1, 2});
  std::vector<QualityRanking> one{single};
  auto same = aggregate_ranks_mean(one);
  CHECK(same.order() == single.order());

  // q1 has ranks (1,3), q2 (2,2), q3 (3,1): means tie at 2.0 for q1 and q2
  // and q3; ties resolve by ascending id.
  std::vector<QualityRanking> two{QualityRanking::from_order({1, 2, 3}),
                                  QualityRanking::from_order({3, 2, 1})};
  auto combined = aggregate_ranks_mean(two);
  CHECK(combined.rank_of(1) == 1);
  CHECK(combined.rank_of(2) == 2);
  CHECK(combined.rank_of(3) == 3);

  std::vector<QualityRanking> copies{single, single, single};
  CHECK(aggregate_ranks_mean(copies).order() == single.order());

  std::vector<QualityRanking> mismatched{single, QualityRanking::from_order({1, 2})};
  CHECK_THROWS_AS(aggregate_ranks_mean(mismatched), std::invalid_argument);
}

TEST_CASE("weighted_feature_rank projects, falls back to ids, and ignores weight scale") {
  std::unordered_map<Id, std::vector<double>> features{
      {1, {0.9, 5.0}}, {2, {0.1, 9.0}}, {3, {0.5, 1.0}}};

  std::vector<double> first_only{1.0, 0.0};
  auto projected = weighted_feature_rank(features, first_only);
  std::vector<Id> questions{1, 2, 3};
  std::unordered_map<Id, double> dim1{{1, 0.9}, {2, 0.1}, {3, 0.5}};
  auto direct = rank_by_feature(questions, dim1, RankDirection::higher_is_better);
  CHECK(projected.order() == direct.order());

  std::vector<double> zeros{0.0, 0.0};
  auto id_order = weighted_feature_rank(features, zeros);
  CHECK(id_order.order() == std::vector<Id>{1, 2, 3});

  std::mt19937_64 rng(73);
  for (int iter = 0; iter < 30; ++iter) {
    std::unordered_map<Id, std::vector<double>> random_features;
    for (Id q = 0; q < 12; ++q) {
      random_features[q] = {static_cast<double>(rng() % 100),
                            static_cast<double>(rng() % 100) / 7.0,
                            static_cast<double>(rng() % 10)};
    }
    std::vector<double> weights{0.2 + static_cast<double>(rng() % 10),
                                static_cast<double>(rng() % 10),
                                static_cast<double>(rng() % 10)};
    auto base = weighted_feature_rank(random_features, weights);
    double scale = 0.5 + static_cast<double>(rng() % 40);
    auto scaled_weights = weights;
    for (double& w : scaled_weights) w *= scale;
    CHECK(weighted_feature_rank(random_features, scaled_weights).order() == base.order());
  }

  std::vector<double> wrong_dim{1.0};
  CHECK_THROWS_AS(weighted_feature_rank(features, wrong_dim), std::invalid_argument);
}

TEST_CASE("agreement_fraction hand instance: 3 of 5 pairs match") {
  auto ranking = QualityRanking::from_order({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  ExpertJudgments judgments;
  judgments.pairs = {{0, 9}, {1, 8}, {2, 7}, {6, 3}, {5, 4}};
  judgments.votes[1] = {ExpertJudgments::Choice::left, ExpertJudgments::Choice::left,
                        ExpertJudgments::Choice::right, ExpertJudgments::Choice::right,
                        ExpertJudgments::Choice::right};
  // Ranking prefers left, left, left, right, right; votes L, L, R, R, R
  // match on 4 of 5 pairs.
  CHECK(agreement_fraction(ranking, judgments, 1) == doctest::Approx(0.8));

  std::unordered_map<Id, int> ranks;
  for (Id q = 0; q < 10; ++q) ranks[q] = static_cast<int>(q) + 1;
  CHECK(agreement_fraction(ranking, judgments, 1) ==
        doctest::Approx(brute_force_agreement(ranks, judgments, 1)));

  judgments.votes[1][3] = ExpertJudgments::Choice::left;  // now 3 of 5 match
  CHECK(agreement_fraction(ranking, judgments, 1) == doctest::Approx(0.6));
  CHECK(agreement_fraction(ranking, judgments, 1) ==
        doctest::Approx(brute_force_agreement(ranks, judgments, 1)));
}

TEST_CASE("agreement of the reversed ranking is the complement") {
  std::mt19937_64 rng(79);
  for (int iter = 0; iter < 40; ++iter) {
    std::vector<Id> order;
    for (Id q = 0; q < 20; ++q) order.push_back(q);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    auto ranking = QualityRanking::from_order(order);

    ExpertJudgments judgments;
    for (int p = 0; p < 10; ++p) {
      Id left = static_cast<Id>(rng() % 20);
      Id right = static_cast<Id>((left + 1 + rng() % 19) % 20);
      judgments.pairs.push_back({left, right});
      judgments.votes[1].push_back(rng() % 2 == 0 ? ExpertJudgments::Choice::left
                                                  : ExpertJudgments::Choice::right);
    }
    double a = agreement_fraction(ranking, judgments, 1);
    double reversed = agreement_fraction(ranking.reversed(), judgments, 1);
    CHECK(a + reversed == doctest::Approx(1.0));
  }
}

TEST_CASE("agreement_fraction errors") {
  auto ranking = QualityRanking::from_order({0, 1});
  ExpertJudgments judgments;
  judgments.pairs = {{0, 5}};
  judgments.votes[1] = {ExpertJudgments::Choice::left};
  CHECK_THROWS_AS(agreement_fraction(ranking, judgments, 1), std::out_of_range);
  CHECK_THROWS_AS(agreement_fraction(ranking, judgments, 9), std::invalid_argument);
}

TEST_CASE("max_agreement reproduces the published per-expert maxima") {
  {
    auto [ranking, judgments] = agreement_fixture({16, 15, 15, 15, 20});
    auto [a_max, expert] = max_agreement(ranking, judgments);
    CHECK(a_max == doctest::Approx(0.8));
    CHECK(expert == 5);
    CHECK(agreement_fraction(ranking, judgments, 1) == doctest::Approx(0.64));
  }
  {
    auto [ranking, judgments] = agreement_fixture({18, 17, 15, 15, 20});
    auto [a_max, expert] = max_agreement(ranking, judgments);
    CHECK(a_max == doctest::Approx(0.8));
    CHECK(expert == 5);
    CHECK(agreement_fraction(ranking, judgments, 2) == doctest::Approx(0.68));
  }
}

TEST_CASE("max_agreement covers each expert and breaks ties low") {
  auto [ranking, judgments] = agreement_fixture({15, 20, 20});
  auto [a_max, expert] = max_agreement(ranking, judgments);
  CHECK(a_max == doctest::Approx(0.8));
  CHECK(expert == 2);  // experts 2 and 3 tie; the smaller id wins
  for (Id e : judgments.experts()) CHECK(a_max >= agreement_fraction(ranking, judgments, e));

  auto [solo_ranking, solo] = agreement_fixture({10});
  CHECK(max_agreement(solo_ranking, solo).first ==
        doctest::Approx(agreement_fraction(solo_ranking, solo, 1)));

  ExpertJudgments empty;
  CHECK_THROWS_AS(max_agreement(ranking, empty), std::invalid_argument);
}

TEST_CASE("ranking csv round-trip and validation") {
  testsupport::TempDir dir;
  auto ranking = QualityRanking::from_order({7, 3, 5});
  auto path = dir.file("ranking.csv");
  write_ranking_csv(path, ranking);
  auto loaded = read_ranking_csv(path);
  CHECK(loaded.order() == ranking.order());
  CHECK(testsupport::read_text(path).rfind("QuestionId,ranking\n", 0) == 0);

  auto dup = dir.file("dup.csv");
  testsupport::write_text(dup, "QuestionId,ranking\n1,1\n2,1\n3,3\n");
  CHECK_THROWS_AS(read_ranking_csv(dup), std::invalid_argument);

  auto gap = dir.file("gap.csv");
  testsupport::write_text(gap, "QuestionId,ranking\n1,1\n2,4\n3,3\n");
  CHECK_THROWS_AS(read_ranking_csv(gap), std::invalid_argument);
}

TEST_CASE("judgment csv parsing") {
  testsupport::TempDir dir;
  auto path = dir.file("judgments.csv");
  testsupport::write_text(path,
                          "PairId,LeftQuestionId,RightQuestionId,ExpertId,Choice\n"
                          "0,10,20,1,left\n"
                          "1,30,40,1,Right\n"
                          "0,10,20,2,right\n"
                          "1,30,40,2,left\n");
  auto judgments = read_judgments_csv(path);
  REQUIRE(judgments.pairs.size() == 2);
  CHECK(judgments.pairs[0].left == 10);
  CHECK(judgments.votes.at(1)[1] == ExpertJudgments::Choice::right);
  CHECK(judgments.votes.at(2)[0] == ExpertJudgments::Choice::right);

  auto missing = dir.file("missing.csv");
  testsupport::write_text(missing,
                          "PairId,LeftQuestionId,RightQuestionId,ExpertId,Choice\n"
                          "0,10,20,1,left\n"
                          "1,30,40,1,right\n"
                          "0,10,20,2,right\n");
  CHECK_THROWS_AS(read_judgments_csv(missing), std::runtime_error);

  auto tie = dir.file("tie.csv");
  testsupport::write_text(tie, "PairId,LeftQuestionId,RightQuestionId,ExpertId,Choice\n"
                               "0,10,20,1,neither\n");
  CHECK_THROWS_AS(read_judgments_csv(tie), std::runtime_error);
}

TEST_CASE("compute_quality_features assembles per-question features") {
  std::unordered_map<Id, AnswerMeta> answers;
  std::vector<ResponseRecord> records;
  for (Id i = 0; i < 6; ++i) {
    records.push_back(rec(i, 0, i, i < 3 ? 1 : 2, 1));
    AnswerMeta meta;
    meta.answer_id = i;
    meta.group_id = 0;
    meta.quiz_id = 0;
    meta.confidence = 40 + static_cast<int>(i);
    answers[i] = meta;
  }
  auto features = compute_quality_features(records, answers);
  REQUIRE(features.count(0) == 1);
  const auto& f = features.at(0);
  CHECK(f.support == 6);
  CHECK(f.choice_entropy == doctest::Approx(1.0));
  CHECK(f.correctness_entropy == doctest::Approx(1.0));
  REQUIRE(f.conditional_group_entropy.has_value());
  CHECK(*f.conditional_group_entropy == doctest::Approx(1.0));
  REQUIRE(f.mean_confidence.has_value());
  CHECK(*f.mean_confidence == doctest::Approx(42.5));
}
