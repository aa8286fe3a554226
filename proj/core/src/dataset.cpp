#include "diagq/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "diagq/rng.hpp"

namespace diagq::data {

ResponseMatrix ResponseMatrix::from_records(std::span<const ResponseRecord> records) {
  ResponseMatrix m;
  std::set<Id> students, questions;
  for (const auto& r : records) {
    if (!record_invariants_hold(r)) {
      throw std::runtime_error("record for user " + std::to_string(r.user_id) + ", question " +
                               std::to_string(r.question_id) + " violates invariants");
    }
    students.insert(r.user_id);
    questions.insert(r.question_id);
  }
  m.student_ids_.assign(students.begin(), students.end());
  m.question_ids_.assign(questions.begin(), questions.end());
  for (std::size_t i = 0; i < m.student_ids_.size(); ++i) m.student_index_[m.student_ids_[i]] = i;
  for (std::size_t j = 0; j < m.question_ids_.size(); ++j) m.question_index_[m.question_ids_[j]] = j;

  m.rows_.resize(m.student_ids_.size());
  for (const auto& r : records) {
    Entry e;
    e.question = static_cast<std::int32_t>(m.question_index_.at(r.question_id));
    e.answer_value = static_cast<std::int8_t>(r.answer_value);
    e.is_correct = static_cast<std::int8_t>(r.is_correct);
    m.rows_[m.student_index_.at(r.user_id)].push_back(e);
  }
  for (std::size_t s = 0; s < m.rows_.size(); ++s) {
    auto& row = m.rows_[s];
    std::sort(row.begin(), row.end(),
              [](const Entry& a, const Entry& b) { return a.question < b.question; });
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i].question == row[i - 1].question) {
        throw std::runtime_error("duplicate (user, question) pair: user " +
                                 std::to_string(m.student_ids_[s]) + ", question " +
                                 std::to_string(m.question_ids_[row[i].question]));
      }
    }
    m.n_observed_ += row.size();
  }
  return m;
}

double ResponseMatrix::density() const {
  if (student_ids_.empty() || question_ids_.empty()) return 0.0;
  return static_cast<double>(n_observed_) /
         (static_cast<double>(n_students()) * static_cast<double>(n_questions()));
}

const ResponseMatrix::Entry* ResponseMatrix::find(std::size_t student_index,
                                                  std::size_t question_index) const {
  const auto& row = rows_[student_index];
  auto it = std::lower_bound(row.begin(), row.end(), question_index,
                             [](const Entry& e, std::size_t q) {
                               return static_cast<std::size_t>(e.question) < q;
                             });
  if (it == row.end() || static_cast<std::size_t>(it->question) != question_index) return nullptr;
  return &*it;
}

std::optional<std::size_t> ResponseMatrix::student_index(Id user_id) const {
  auto it = student_index_.find(user_id);
  if (it == student_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ResponseMatrix::question_index(Id question_id) const {
  auto it = question_index_.find(question_id);
  if (it == question_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<ResponseRecord> dedupe_latest(std::span<const ResponseRecord> records,
                                          const std::unordered_map<Id, AnswerMeta>& answers) {
  struct Key {
    Id user;
    Id question;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = std::hash<Id>{}(k.user);
      return h ^ (std::hash<Id>{}(k.question) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
    }
  };

  std::unordered_map<Key, std::size_t, KeyHash> best;  // key -> index into records
  best.reserve(records.size());
  auto answered_at = [&](const ResponseRecord& r) -> Timestamp {
    auto it = answers.find(r.answer_id);
    if (it == answers.end()) {
      throw std::runtime_error("answer id " + std::to_string(r.answer_id) +
                               " missing from answer metadata");
    }
    return it->second.date_answered;
  };

  std::vector<std::size_t> order;  // first-seen order of surviving keys
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    Timestamp when = answered_at(r);
    auto [it, inserted] = best.try_emplace(Key{r.user_id, r.question_id}, i);
    if (inserted) {
      order.push_back(i);
      continue;
    }
    const auto& current = records[it->second];
    Timestamp current_when = answered_at(current);
    if (when > current_when || (when == current_when && r.answer_id > current.answer_id)) {
      // Keep output order stable at the first occurrence of the pair.
      std::replace(order.begin(), order.end(), it->second, i);
      it->second = i;
    }
  }

  std::vector<ResponseRecord> result;
  result.reserve(order.size());
  for (std::size_t i : order) result.push_back(records[i]);
  return result;
}

std::vector<ResponseRecord> filter_min_counts(std::span<const ResponseRecord> records,
                                              std::size_t min_q, std::size_t min_s) {
  std::unordered_map<Id, std::size_t> question_counts;
  for (const auto& r : records) ++question_counts[r.question_id];

  std::vector<ResponseRecord> after_questions;
  after_questions.reserve(records.size());
  for (const auto& r : records) {
    if (question_counts[r.question_id] >= min_q) after_questions.push_back(r);
  }

  std::unordered_map<Id, std::size_t> student_counts;
  for (const auto& r : after_questions) ++student_counts[r.user_id];

  std::vector<ResponseRecord> result;
  result.reserve(after_questions.size());
  for (const auto& r : after_questions) {
    if (student_counts[r.user_id] >= min_s) result.push_back(r);
  }
  return result;
}

namespace {

void check_fractions(const std::array<double, 3>& fractions) {
  double sum = 0;
  for (double f : fractions) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw std::invalid_argument("split fractions must be non-negative");
    }
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }
}

}  // namespace

std::array<std::size_t, 3> apportion_sizes(std::size_t n, const std::array<double, 3>& fractions) {
  check_fractions(fractions);
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainders{};
  std::size_t allocated = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    double exact = static_cast<double>(n) * fractions[i];
    sizes[i] = static_cast<std::size_t>(std::floor(exact));
    remainders[i] = exact - std::floor(exact);
    allocated += sizes[i];
  }
  std::array<std::size_t, 3> idx{0, 1, 2};
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; allocated < n; ++i) {
    ++sizes[idx[i % 3]];
    ++allocated;
  }
  return sizes;
}

RecordSplit split_records(std::span<const ResponseRecord> records,
                          const std::array<double, 3>& fractions, std::uint64_t seed) {
  auto sizes = apportion_sizes(records.size(), fractions);
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  seeded_shuffle(order, seed);

  RecordSplit split;
  split.train.reserve(sizes[0]);
  split.public_test.reserve(sizes[1]);
  split.private_test.reserve(sizes[2]);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& r = records[order[i]];
    if (i < sizes[0]) {
      split.train.push_back(r);
    } else if (i < sizes[0] + sizes[1]) {
      split.public_test.push_back(r);
    } else {
      split.private_test.push_back(r);
    }
  }
  return split;
}

RecordSplit split_students(std::span<const ResponseRecord> records,
                           const std::array<double, 3>& fractions, std::uint64_t seed) {
  std::set<Id> seen;
  for (const auto& r : records) seen.insert(r.user_id);
  std::vector<Id> students(seen.begin(), seen.end());
  auto sizes = apportion_sizes(students.size(), fractions);
  seeded_shuffle(students, seed);

  std::unordered_map<Id, int> part_of;  // 0 train, 1 public, 2 private
  part_of.reserve(students.size());
  for (std::size_t i = 0; i < students.size(); ++i) {
    int part = i < sizes[0] ? 0 : (i < sizes[0] + sizes[1] ? 1 : 2);
    part_of[students[i]] = part;
  }

  RecordSplit split;
  for (const auto& r : records) {
    switch (part_of.at(r.user_id)) {
      case 0: split.train.push_back(r); break;
      case 1: split.public_test.push_back(r); break;
      default: split.private_test.push_back(r); break;
    }
  }
  return split;
}

}  // namespace diagq::data
