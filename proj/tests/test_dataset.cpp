#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "diagq/dataset.hpp"

using namespace diagq::data;

namespace {

ResponseRecord make_record(Id user, Id question, Id answer, int value, int correct) {
  return ResponseRecord{question, user, answer, value, correct,
                        value == correct ? 1 : 0};
}

std::unordered_map<Id, AnswerMeta> meta_with_dates(
    const std::vector<std::pair<Id, std::string>>& dates) {
  std::unordered_map<Id, AnswerMeta> meta;
  for (const auto& [answer_id, date] : dates) {
    AnswerMeta a;
    a.answer_id = answer_id;
    a.date_answered = diagq::parse_timestamp(date);
    meta[answer_id] = a;
  }
  return meta;
}

using RecordKey = std::tuple<Id, Id, Id, int, int, int>;
RecordKey key(const ResponseRecord& r) {
  return {r.question_id, r.user_id, r.answer_id, r.answer_value, r.correct_answer, r.is_correct};
}

std::multiset<RecordKey> multiset_of(const std::vector<ResponseRecord>& records) {
  std::multiset<RecordKey> keys;
  for (const auto& r : records) keys.insert(key(r));
  return keys;
}

std::vector<ResponseRecord> random_dataset(std::mt19937_64& rng, std::size_t n_students,
                                           std::size_t n_questions, double density,
                                           std::unordered_map<Id, AnswerMeta>* meta = nullptr) {
  std::vector<ResponseRecord> records;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Id answer_id = 0;
  for (std::size_t s = 0; s < n_students; ++s) {
    for (std::size_t q = 0; q < n_questions; ++q) {
      if (unit(rng) >= density) continue;
      int correct = static_cast<int>(rng() % 4) + 1;
      int value = static_cast<int>(rng() % 4) + 1;
      records.push_back(make_record(static_cast<Id>(s), static_cast<Id>(q), answer_id, value,
                                    correct));
      if (meta != nullptr) {
        AnswerMeta a;
        a.answer_id = answer_id;
        a.date_answered = diagq::Timestamp{static_cast<std::int64_t>(rng() % 1000000)};
        (*meta)[answer_id] = a;
      }
      ++answer_id;
    }
  }
  return records;
}

}  // namespace

TEST_CASE("dedupe_latest keeps the latest record per pair") {
  auto meta = meta_with_dates({{1, "2019-01-01"}, {2, "2019-06-01"}});
  std::vector<ResponseRecord> records{make_record(5, 7, 1, 2, 2), make_record(5, 7, 2, 3, 2)};
  auto result = dedupe_latest(records, meta);
  REQUIRE(result.size() == 1);
  CHECK(result[0].answer_id == 2);
  CHECK(result[0].answer_value == 3);
}

TEST_CASE("dedupe_latest breaks timestamp ties by the larger answer id") {
  auto meta = meta_with_dates({{5, "2019-01-01"}, {9, "2019-01-01"}, {7, "2019-01-01"}});
  std::vector<ResponseRecord> records{make_record(1, 1, 5, 1, 1), make_record(1, 1, 9, 2, 1),
                                      make_record(1, 1, 7, 3, 1)};
  auto result = dedupe_latest(records, meta);
  REQUIRE(result.size() == 1);
  CHECK(result[0].answer_id == 9);
}

TEST_CASE("dedupe_latest with no duplicates is set-equal to the input") {
  auto meta = meta_with_dates({{1, "2019-01-01"}, {2, "2019-01-02"}});
  std::vector<ResponseRecord> records{make_record(1, 1, 1, 1, 1), make_record(2, 1, 2, 2, 1)};
  CHECK(multiset_of(dedupe_latest(records, meta)) == multiset_of(records));
}

TEST_CASE("dedupe_latest throws on an unresolvable answer id") {
  auto meta = meta_with_dates({{1, "2019-01-01"}});
  std::vector<ResponseRecord> records{make_record(1, 1, 99, 1, 1)};
  CHECK_THROWS_WITH_AS(dedupe_latest(records, meta), doctest::Contains("99"), std::runtime_error);
}

TEST_CASE("dedupe_latest is idempotent on random datasets") {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 20; ++iter) {
    std::unordered_map<Id, AnswerMeta> meta;
    auto records = random_dataset(rng, 12, 8, 0.6, &meta);
    // Inject duplicates.
    for (int d = 0; d < 10 && !records.empty(); ++d) {
      auto copy = records[rng() % records.size()];
      copy.answer_id = 100000 + d;
      AnswerMeta a;
      a.answer_id = copy.answer_id;
      a.date_answered = diagq::Timestamp{static_cast<std::int64_t>(rng() % 1000000)};
      meta[copy.answer_id] = a;
      records.push_back(copy);
    }
    auto once = dedupe_latest(records, meta);
    auto twice = dedupe_latest(once, meta);
    CHECK(multiset_of(once) == multiset_of(twice));
    std::set<std::pair<Id, Id>> pairs;
    for (const auto& r : once) CHECK(pairs.insert({r.user_id, r.question_id}).second);
  }
}

TEST_CASE("filter_min_counts with thresholds of 1 is the identity") {
  std::mt19937_64 rng(4);
  auto records = random_dataset(rng, 10, 10, 0.5);
  CHECK(multiset_of(filter_min_counts(records, 1, 1)) == multiset_of(records));
}

TEST_CASE("filter_min_counts keeps a fully crossed block") {
  // 50 students x 60 questions: every question has 50 answers and every
  // student 60, so both passes keep everything.
  std::vector<ResponseRecord> records;
  Id answer = 0;
  for (Id s = 0; s < 50; ++s) {
    for (Id q = 0; q < 60; ++q) records.push_back(make_record(s, q, answer++, 1, 1));
  }
  CHECK(filter_min_counts(records, 50, 50).size() == records.size());
}

TEST_CASE("filter_min_counts question pass runs before the student pass") {
  // 10 students x 60 questions leaves every question with only 10 answers,
  // so the question pass clears the whole block even though every student
  // has 60 answers.
  std::vector<ResponseRecord> records;
  Id answer = 0;
  for (Id s = 0; s < 10; ++s) {
    for (Id q = 0; q < 60; ++q) records.push_back(make_record(s, q, answer++, 1, 1));
  }
  CHECK(filter_min_counts(records, 50, 50).empty());
}

TEST_CASE("filter_min_counts empties a single-student dataset") {
  std::vector<ResponseRecord> records;
  for (Id q = 0; q < 100; ++q) records.push_back(make_record(0, q, q, 1, 1));
  CHECK(filter_min_counts(records, 50, 50).empty());
}

TEST_CASE("filter_min_counts pass invariants hold on random datasets") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 20; ++iter) {
    auto records = random_dataset(rng, 30, 20, 0.4);
    const std::size_t min_q = 5, min_s = 4;

    std::unordered_map<Id, std::size_t> question_counts_before;
    for (const auto& r : records) ++question_counts_before[r.question_id];

    auto result = filter_min_counts(records, min_q, min_s);
    std::unordered_map<Id, std::size_t> student_counts_after;
    for (const auto& r : result) {
      // Every surviving question had >= min_q answers at the question pass.
      CHECK(question_counts_before[r.question_id] >= min_q);
      ++student_counts_after[r.user_id];
    }
    for (const auto& [_, n] : student_counts_after) CHECK(n >= min_s);
  }
}

TEST_CASE("build_matrix assigns dense indices by ascending external id") {
  std::vector<ResponseRecord> records{make_record(9, 5, 0, 1, 1), make_record(2, 5, 1, 2, 1),
                                      make_record(2, 3, 2, 4, 4)};
  auto matrix = ResponseMatrix::from_records(records);
  CHECK(matrix.n_students() == 2);
  CHECK(matrix.n_questions() == 2);
  CHECK(matrix.student_id(0) == 2);
  CHECK(matrix.student_id(1) == 9);
  CHECK(matrix.question_id(0) == 3);
  CHECK(matrix.question_id(1) == 5);
  CHECK(matrix.density() == doctest::Approx(0.75));
  const auto* cell = matrix.find(0, 1);
  REQUIRE(cell != nullptr);
  CHECK(cell->answer_value == 2);
  CHECK(matrix.find(1, 0) == nullptr);
}

TEST_CASE("build_matrix on an empty record list") {
  auto matrix = ResponseMatrix::from_records({});
  CHECK(matrix.n_students() == 0);
  CHECK(matrix.n_questions() == 0);
  CHECK(matrix.n_observed() == 0);
}

TEST_CASE("build_matrix on the four example answer records") {
  std::vector<ResponseRecord> records{
      make_record(452, 10322, 8466, 4, 4), make_record(11235, 2955, 1592, 3, 2),
      make_record(18545, 3287, 1411, 1, 2), make_record(13898, 10322, 6950, 2, 1)};
  auto matrix = ResponseMatrix::from_records(records);
  CHECK(matrix.n_students() == 4);
  CHECK(matrix.n_questions() == 3);
  CHECK(matrix.density() == doctest::Approx(4.0 / 12.0));
}

TEST_CASE("build_matrix rejects duplicate pairs") {
  std::vector<ResponseRecord> records{make_record(1, 1, 0, 1, 1), make_record(1, 1, 1, 2, 1)};
  CHECK_THROWS_WITH_AS(ResponseMatrix::from_records(records), doctest::Contains("duplicate"),
                       std::runtime_error);
}

TEST_CASE("build_matrix preserves correctness totals") {
  std::mt19937_64 rng(6);
  for (int iter = 0; iter < 10; ++iter) {
    auto records = random_dataset(rng, 15, 10, 0.5);
    auto matrix = ResponseMatrix::from_records(records);
    std::int64_t record_sum = 0;
    for (const auto& r : records) record_sum += r.is_correct;
    std::int64_t cell_sum = 0;
    for (std::size_t s = 0; s < matrix.n_students(); ++s) {
      for (const auto& e : matrix.row(s)) cell_sum += e.is_correct;
    }
    CHECK(cell_sum == record_sum);
    CHECK(matrix.n_observed() == records.size());
  }
}

TEST_CASE("apportion_sizes uses largest-remainder allocation") {
  const std::array<double, 3> fractions{0.8, 0.1, 0.1};
  CHECK(apportion_sizes(10, fractions) == std::array<std::size_t, 3>{8, 1, 1});
  // n = 7: floors are (5,0,0) and the two remainder seats go to the 0.7
  // fractional parts, so train is not starved and no split double-dips.
  CHECK(apportion_sizes(7, fractions) == std::array<std::size_t, 3>{5, 1, 1});
  CHECK(apportion_sizes(0, fractions) == std::array<std::size_t, 3>{0, 0, 0});
  CHECK(apportion_sizes(1, fractions) == std::array<std::size_t, 3>{1, 0, 0});

  std::mt19937_64 rng(8);
  for (int iter = 0; iter < 200; ++iter) {
    std::size_t n = rng() % 1000;
    auto sizes = apportion_sizes(n, fractions);
    CHECK(sizes[0] + sizes[1] + sizes[2] == n);
  }
}

TEST_CASE("apportion_sizes rejects invalid fractions") {
  CHECK_THROWS_AS(apportion_sizes(10, {0.5, 0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(apportion_sizes(10, {-0.2, 0.6, 0.6}), std::invalid_argument);
}

TEST_CASE("split_records partitions exactly for many seeds") {
  std::mt19937_64 rng(9);
  auto records = random_dataset(rng, 20, 15, 0.5);
  const std::array<double, 3> fractions{0.8, 0.1, 0.1};
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto split = split_records(records, fractions, seed);
    auto sizes = apportion_sizes(records.size(), fractions);
    CHECK(split.train.size() == sizes[0]);
    CHECK(split.public_test.size() == sizes[1]);
    CHECK(split.private_test.size() == sizes[2]);

    auto all = split.train;
    all.insert(all.end(), split.public_test.begin(), split.public_test.end());
    all.insert(all.end(), split.private_test.begin(), split.private_test.end());
    CHECK(multiset_of(all) == multiset_of(records));
  }
}

TEST_CASE("split_records is deterministic for a fixed seed") {
  std::mt19937_64 rng(10);
  auto records = random_dataset(rng, 10, 10, 0.5);
  auto a = split_records(records, {0.8, 0.1, 0.1}, 42);
  auto b = split_records(records, {0.8, 0.1, 0.1}, 42);
  CHECK(multiset_of(a.train) == multiset_of(b.train));
  CHECK(multiset_of(a.public_test) == multiset_of(b.public_test));
  CHECK(multiset_of(a.private_test) == multiset_of(b.private_test));
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(key(a.train[i]) == key(b.train[i]));
  }
}

TEST_CASE("split_students keeps each student's records together") {
  std::mt19937_64 rng(12);
  auto records = random_dataset(rng, 10, 30, 0.9);
  auto split = split_students(records, {0.8, 0.1, 0.1}, 1);

  auto students_of = [](const std::vector<ResponseRecord>& rs) {
    std::set<Id> ids;
    for (const auto& r : rs) ids.insert(r.user_id);
    return ids;
  };
  auto train = students_of(split.train);
  auto pub = students_of(split.public_test);
  auto priv = students_of(split.private_test);
  CHECK(train.size() == 8);
  CHECK(pub.size() == 1);
  CHECK(priv.size() == 1);
  for (Id s : pub) CHECK(!train.count(s));
  for (Id s : priv) {
    CHECK(!train.count(s));
    CHECK(!pub.count(s));
  }

  auto all = split.train;
  all.insert(all.end(), split.public_test.begin(), split.public_test.end());
  all.insert(all.end(), split.private_test.begin(), split.private_test.end());
  CHECK(multiset_of(all) == multiset_of(records));
}

TEST_CASE("split_students puts every record of a held-out student in one part") {
  std::vector<ResponseRecord> records;
  Id answer = 0;
  for (Id s = 0; s < 10; ++s) {
    std::size_t rows = s == 4 ? 200 : 20;
    for (std::size_t i = 0; i < rows; ++i) {
      records.push_back(make_record(s, static_cast<Id>(i), answer++, 1, 1));
    }
  }
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto split = split_students(records, {0.8, 0.1, 0.1}, seed);
    int parts_with_student = 0;
    for (const auto* part : {&split.train, &split.public_test, &split.private_test}) {
      std::size_t n = std::count_if(part->begin(), part->end(),
                                    [](const ResponseRecord& r) { return r.user_id == 4; });
      if (n > 0) {
        ++parts_with_student;
        CHECK(n == 200);
      }
    }
    CHECK(parts_with_student == 1);
  }
}
