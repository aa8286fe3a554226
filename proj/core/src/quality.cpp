#include "diagq/quality.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <set>
#include <stdexcept>

#include "diagq/csv.hpp"

namespace diagq::quality {

namespace {

double entropy_term(double p) { return p > 0 ? -p * std::log2(p) : 0.0; }

}  // namespace

double choice_entropy(const std::array<std::int64_t, 4>& counts) {
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) throw std::invalid_argument("choice_entropy: negative count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("choice_entropy: zero total count");
  double h = 0;
  for (auto c : counts) h += entropy_term(static_cast<double>(c) / static_cast<double>(total));
  return h;
}

double correctness_entropy(std::int64_t n_correct, std::int64_t n_incorrect) {
  if (n_correct < 0 || n_incorrect < 0) {
    throw std::invalid_argument("correctness_entropy: negative count");
  }
  std::int64_t total = n_correct + n_incorrect;
  if (total == 0) throw std::invalid_argument("correctness_entropy: zero total count");
  double p = static_cast<double>(n_correct) / static_cast<double>(total);
  return entropy_term(p) + entropy_term(1.0 - p);
}

std::unordered_map<Id, std::array<std::int64_t, 4>> choice_counts(
    std::span<const data::ResponseRecord> records) {
  std::unordered_map<Id, std::array<std::int64_t, 4>> counts;
  for (const auto& r : records) {
    ++counts[r.question_id][static_cast<std::size_t>(r.answer_value - 1)];
  }
  return counts;
}

std::unordered_map<Id, double> conditional_correctness_entropy(
    std::span<const data::ResponseRecord> records,
    const std::unordered_map<Id, data::AnswerMeta>& answers, Condition condition) {
  struct CellStats {
    std::int64_t n = 0;
    std::int64_t correct = 0;
  };
  // (question, conditioning id) -> counts
  std::unordered_map<Id, std::map<Id, CellStats>> cells;
  for (const auto& r : records) {
    auto it = answers.find(r.answer_id);
    if (it == answers.end()) {
      throw std::runtime_error("answer id " + std::to_string(r.answer_id) +
                               " missing from answer metadata");
    }
    Id key = condition == Condition::group ? it->second.group_id : it->second.quiz_id;
    auto& cell = cells[r.question_id][key];
    ++cell.n;
    cell.correct += r.is_correct;
  }

  std::unordered_map<Id, double> result;
  for (const auto& [question, by_key] : cells) {
    double weighted = 0;
    std::int64_t total = 0;
    for (const auto& [_, cell] : by_key) {
      if (cell.n < 2) continue;  // degenerate cells would reward sparsity
      weighted += static_cast<double>(cell.n) *
                  correctness_entropy(cell.correct, cell.n - cell.correct);
      total += cell.n;
    }
    if (total > 0) result[question] = weighted / static_cast<double>(total);
  }
  return result;
}

std::unordered_map<Id, double> mean_confidence(
    std::span<const data::ResponseRecord> records,
    const std::unordered_map<Id, data::AnswerMeta>& answers) {
  struct Sum {
    double total = 0;
    std::int64_t n = 0;
  };
  std::unordered_map<Id, Sum> sums;
  for (const auto& r : records) {
    auto it = answers.find(r.answer_id);
    if (it == answers.end() || !it->second.confidence) continue;
    auto& s = sums[r.question_id];
    s.total += static_cast<double>(*it->second.confidence);
    ++s.n;
  }
  std::unordered_map<Id, double> result;
  result.reserve(sums.size());
  for (const auto& [question, s] : sums) result[question] = s.total / static_cast<double>(s.n);
  return result;
}

std::unordered_map<Id, QualityFeatures> compute_quality_features(
    std::span<const data::ResponseRecord> records,
    const std::unordered_map<Id, data::AnswerMeta>& answers) {
  std::unordered_map<Id, QualityFeatures> features;
  auto counts = choice_counts(records);
  std::unordered_map<Id, std::pair<std::int64_t, std::int64_t>> correct_counts;
  for (const auto& r : records) {
    auto& [n, correct] = correct_counts[r.question_id];
    ++n;
    correct += r.is_correct;
  }
  for (const auto& [question, c] : counts) {
    QualityFeatures f;
    f.choice_entropy = choice_entropy(c);
    const auto& [n, correct] = correct_counts.at(question);
    f.correctness_entropy = correctness_entropy(correct, n - correct);
    f.support = n;
    features[question] = f;
  }
  if (!answers.empty()) {
    for (const auto& [question, v] : conditional_correctness_entropy(records, answers,
                                                                     Condition::group)) {
      features.at(question).conditional_group_entropy = v;
    }
    for (const auto& [question, v] : conditional_correctness_entropy(records, answers,
                                                                     Condition::quiz)) {
      features.at(question).conditional_quiz_entropy = v;
    }
    for (const auto& [question, v] : mean_confidence(records, answers)) {
      features.at(question).mean_confidence = v;
    }
  }
  return features;
}

QualityRanking QualityRanking::from_order(std::vector<Id> order) {
  QualityRanking ranking;
  ranking.rank_of_.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!ranking.rank_of_.emplace(order[i], static_cast<int>(i) + 1).second) {
      throw std::invalid_argument("ranking contains question " + std::to_string(order[i]) +
                                  " twice");
    }
  }
  ranking.order_ = std::move(order);
  return ranking;
}

QualityRanking QualityRanking::from_ranks(const std::unordered_map<Id, int>& ranks) {
  std::vector<Id> order(ranks.size(), 0);
  std::vector<bool> seen(ranks.size(), false);
  for (const auto& [question, rank] : ranks) {
    if (rank < 1 || static_cast<std::size_t>(rank) > ranks.size() ||
        seen[static_cast<std::size_t>(rank - 1)]) {
      throw std::invalid_argument("ranks are not a permutation of 1.." +
                                  std::to_string(ranks.size()));
    }
    seen[static_cast<std::size_t>(rank - 1)] = true;
    order[static_cast<std::size_t>(rank - 1)] = question;
  }
  return from_order(std::move(order));
}

int QualityRanking::rank_of(Id question_id) const {
  auto it = rank_of_.find(question_id);
  if (it == rank_of_.end()) {
    throw std::out_of_range("question " + std::to_string(question_id) + " not in ranking");
  }
  return it->second;
}

bool QualityRanking::contains(Id question_id) const {
  return rank_of_.find(question_id) != rank_of_.end();
}

QualityRanking QualityRanking::reversed() const {
  std::vector<Id> order(order_.rbegin(), order_.rend());
  return from_order(std::move(order));
}

QualityRanking rank_by_feature(std::span<const Id> questions,
                               const std::unordered_map<Id, double>& values,
                               RankDirection direction,
                               const std::unordered_map<Id, double>* fallback,
                               RankDirection fallback_direction) {
  auto signed_value = [](double v, RankDirection d) {
    return d == RankDirection::higher_is_better ? -v : v;
  };
  struct Entry {
    int tier;     // 0 = has a value, 1 = fallback block
    double key;   // direction-adjusted sort key inside the tier
    Id question;
  };
  std::vector<Entry> entries;
  entries.reserve(questions.size());
  std::set<Id> unique;
  for (Id q : questions) {
    if (!unique.insert(q).second) {
      throw std::invalid_argument("duplicate question id " + std::to_string(q));
    }
    auto it = values.find(q);
    if (it != values.end()) {
      entries.push_back({0, signed_value(it->second, direction), q});
    } else if (fallback != nullptr && fallback->count(q) > 0) {
      entries.push_back({1, signed_value(fallback->at(q), fallback_direction), q});
    } else {
      entries.push_back({1, std::numeric_limits<double>::infinity(), q});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.tier != b.tier) return a.tier < b.tier;
    if (a.key != b.key) return a.key < b.key;
    return a.question < b.question;
  });
  std::vector<Id> order;
  order.reserve(entries.size());
  for (const auto& e : entries) order.push_back(e.question);
  return QualityRanking::from_order(std::move(order));
}

QualityRanking aggregate_ranks_mean(std::span<const QualityRanking> rankings) {
  if (rankings.empty()) throw std::invalid_argument("aggregate_ranks_mean: no rankings");
  const auto& base = rankings.front();
  for (const auto& r : rankings) {
    if (r.size() != base.size()) {
      throw std::invalid_argument("aggregate_ranks_mean: rankings cover different question sets");
    }
    for (Id q : base.order()) {
      if (!r.contains(q)) {
        throw std::invalid_argument(
            "aggregate_ranks_mean: rankings cover different question sets");
      }
    }
  }
  std::vector<std::pair<double, Id>> means;
  means.reserve(base.size());
  for (Id q : base.order()) {
    double total = 0;
    for (const auto& r : rankings) total += static_cast<double>(r.rank_of(q));
    means.emplace_back(total / static_cast<double>(rankings.size()), q);
  }
  std::sort(means.begin(), means.end());
  std::vector<Id> order;
  order.reserve(means.size());
  for (const auto& [_, q] : means) order.push_back(q);
  return QualityRanking::from_order(std::move(order));
}

QualityRanking weighted_feature_rank(
    const std::unordered_map<Id, std::vector<double>>& features, std::span<const double> weights) {
  const std::size_t dims = weights.size();
  for (const auto& [question, vec] : features) {
    if (vec.size() != dims) {
      throw std::invalid_argument("feature vector for question " + std::to_string(question) +
                                  " has wrong dimension");
    }
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw std::invalid_argument("weights must be finite");
  }

  std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dims, -std::numeric_limits<double>::infinity());
  for (const auto& [_, vec] : features) {
    for (std::size_t d = 0; d < dims; ++d) {
      lo[d] = std::min(lo[d], vec[d]);
      hi[d] = std::max(hi[d], vec[d]);
    }
  }

  std::vector<std::pair<double, Id>> scored;  // (-score, id) for ascending sort
  scored.reserve(features.size());
  for (const auto& [question, vec] : features) {
    double score = 0;
    for (std::size_t d = 0; d < dims; ++d) {
      double range = hi[d] - lo[d];
      double normalized = range > 0 ? (vec[d] - lo[d]) / range : 0.5;
      score += weights[d] * normalized;
    }
    scored.emplace_back(-score, question);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<Id> order;
  order.reserve(scored.size());
  for (const auto& [_, q] : scored) order.push_back(q);
  return QualityRanking::from_order(std::move(order));
}

std::vector<Id> ExpertJudgments::experts() const {
  std::vector<Id> ids;
  ids.reserve(votes.size());
  for (const auto& [expert, _] : votes) ids.push_back(expert);
  return ids;
}

void ExpertJudgments::validate() const {
  for (const auto& [expert, choices] : votes) {
    if (choices.size() != pairs.size()) {
      throw std::runtime_error("expert " + std::to_string(expert) + " voted on " +
                               std::to_string(choices.size()) + " of " +
                               std::to_string(pairs.size()) + " pairs");
    }
  }
}

double agreement_fraction(const QualityRanking& ranking, const ExpertJudgments& judgments,
                          Id expert) {
  auto it = judgments.votes.find(expert);
  if (it == judgments.votes.end()) {
    throw std::invalid_argument("unknown expert " + std::to_string(expert));
  }
  judgments.validate();
  if (judgments.pairs.empty()) throw std::invalid_argument("no judged pairs");
  std::size_t matching = 0;
  for (std::size_t i = 0; i < judgments.pairs.size(); ++i) {
    const auto& pair = judgments.pairs[i];
    bool ranking_prefers_left = ranking.rank_of(pair.left) < ranking.rank_of(pair.right);
    bool expert_prefers_left = it->second[i] == ExpertJudgments::Choice::left;
    if (ranking_prefers_left == expert_prefers_left) ++matching;
  }
  return static_cast<double>(matching) / static_cast<double>(judgments.pairs.size());
}

std::pair<double, Id> max_agreement(const QualityRanking& ranking,
                                    const ExpertJudgments& judgments) {
  if (judgments.votes.empty()) throw std::invalid_argument("no experts");
  double best = -1;
  Id best_expert = 0;
  for (const auto& [expert, _] : judgments.votes) {  // map iterates ascending expert id
    double a = agreement_fraction(ranking, judgments, expert);
    if (a > best) {
      best = a;
      best_expert = expert;
    }
  }
  return {best, best_expert};
}

namespace {

std::int64_t to_int(const std::string& s, const std::string& what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("invalid " + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

QualityRanking read_ranking_csv(const std::filesystem::path& path) {
  csv::Table table = csv::read_file(path);
  const std::size_t c_question = table.require_column("QuestionId");
  const std::size_t c_rank = table.require_column("ranking");
  std::unordered_map<Id, int> ranks;
  for (const auto& row : table.rows) {
    Id question = to_int(row.at(c_question), "QuestionId");
    int rank = static_cast<int>(to_int(row.at(c_rank), "ranking"));
    if (!ranks.emplace(question, rank).second) {
      throw std::runtime_error("duplicate QuestionId " + std::to_string(question));
    }
  }
  return QualityRanking::from_ranks(ranks);
}

void write_ranking_csv(const std::filesystem::path& path, const QualityRanking& ranking) {
  std::vector<Id> questions(ranking.order());
  std::sort(questions.begin(), questions.end());
  csv::Table table;
  table.header = {"QuestionId", "ranking"};
  table.rows.reserve(questions.size());
  for (Id q : questions) {
    table.rows.push_back({std::to_string(q), std::to_string(ranking.rank_of(q))});
  }
  csv::write_file(path, table);
}

ExpertJudgments read_judgments_csv(const std::filesystem::path& path) {
  csv::Table table = csv::read_file(path);
  const std::size_t c_pair = table.require_column("PairId");
  const std::size_t c_left = table.require_column("LeftQuestionId");
  const std::size_t c_right = table.require_column("RightQuestionId");
  const std::size_t c_expert = table.require_column("ExpertId");
  const std::size_t c_choice = table.require_column("Choice");

  std::map<Id, ExpertJudgments::QuestionPair> pair_of;
  std::map<Id, std::map<Id, ExpertJudgments::Choice>> votes_by_expert;  // expert -> pair -> vote
  for (const auto& row : table.rows) {
    Id pair_id = to_int(row.at(c_pair), "PairId");
    ExpertJudgments::QuestionPair pair{to_int(row.at(c_left), "LeftQuestionId"),
                                       to_int(row.at(c_right), "RightQuestionId")};
    auto [it, inserted] = pair_of.emplace(pair_id, pair);
    if (!inserted && (it->second.left != pair.left || it->second.right != pair.right)) {
      throw std::runtime_error("pair " + std::to_string(pair_id) +
                               " listed with different questions");
    }
    std::string choice = row.at(c_choice);
    for (char& c : choice) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    ExpertJudgments::Choice vote;
    if (choice == "left") {
      vote = ExpertJudgments::Choice::left;
    } else if (choice == "right") {
      vote = ExpertJudgments::Choice::right;
    } else {
      throw std::runtime_error("invalid Choice '" + row.at(c_choice) +
                               "' (expected left or right)");
    }
    Id expert = to_int(row.at(c_expert), "ExpertId");
    if (!votes_by_expert[expert].emplace(pair_id, vote).second) {
      throw std::runtime_error("expert " + std::to_string(expert) + " voted twice on pair " +
                               std::to_string(pair_id));
    }
  }

  ExpertJudgments judgments;
  judgments.pairs.reserve(pair_of.size());
  std::vector<Id> pair_ids;
  for (const auto& [pair_id, pair] : pair_of) {
    pair_ids.push_back(pair_id);
    judgments.pairs.push_back(pair);
  }
  for (const auto& [expert, votes] : votes_by_expert) {
    auto& flat = judgments.votes[expert];
    flat.reserve(pair_ids.size());
    for (Id pair_id : pair_ids) {
      auto it = votes.find(pair_id);
      if (it == votes.end()) {
        throw std::runtime_error("expert " + std::to_string(expert) + " did not vote on pair " +
                                 std::to_string(pair_id));
      }
      flat.push_back(it->second);
    }
  }
  judgments.validate();
  return judgments;
}

}  // namespace diagq::quality
