#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "diagq/records.hpp"

namespace diagq::data {

/// Sparse student x question response store. Rows are students; dense indices
/// are assigned by ascending external id. Immutable after construction.
class ResponseMatrix {
 public:
  struct Entry {
    std::int32_t question = 0;  // dense question index
    std::int8_t answer_value = 0;
    std::int8_t is_correct = 0;
  };

  ResponseMatrix() = default;
  static ResponseMatrix from_records(std::span<const ResponseRecord> records);

  std::size_t n_students() const { return student_ids_.size(); }
  std::size_t n_questions() const { return question_ids_.size(); }
  std::size_t n_observed() const { return n_observed_; }
  double density() const;

  /// Entries of one student, sorted by question index.
  std::span<const Entry> row(std::size_t student_index) const { return rows_[student_index]; }

  /// Cell lookup by dense indices; nullptr when unobserved.
  const Entry* find(std::size_t student_index, std::size_t question_index) const;

  Id student_id(std::size_t index) const { return student_ids_[index]; }
  Id question_id(std::size_t index) const { return question_ids_[index]; }
  std::optional<std::size_t> student_index(Id user_id) const;
  std::optional<std::size_t> question_index(Id question_id) const;

  const std::vector<Id>& student_ids() const { return student_ids_; }
  const std::vector<Id>& question_ids() const { return question_ids_; }

 private:
  std::vector<Id> student_ids_;
  std::vector<Id> question_ids_;
  std::unordered_map<Id, std::size_t> student_index_;
  std::unordered_map<Id, std::size_t> question_index_;
  std::vector<std::vector<Entry>> rows_;
  std::size_t n_observed_ = 0;
};

/// Keeps one record per (user, question): the one with the latest
/// DateAnswered, ties broken toward the larger answer id. Throws when a
/// record's answer id is missing from the metadata.
std::vector<ResponseRecord> dedupe_latest(std::span<const ResponseRecord> records,
                                          const std::unordered_map<Id, AnswerMeta>& answers);

/// Two sequential passes: drop questions with fewer than min_q answers, then
/// drop students with fewer than min_s remaining answers. Not iterated to a
/// fixed point.
std::vector<ResponseRecord> filter_min_counts(std::span<const ResponseRecord> records,
                                              std::size_t min_q = 50, std::size_t min_s = 50);

struct RecordSplit {
  std::vector<ResponseRecord> train;
  std::vector<ResponseRecord> public_test;
  std::vector<ResponseRecord> private_test;
};

/// Largest-remainder apportionment of n into parts proportional to fractions;
/// remainder seats go to the largest fractional parts, ties to earlier parts.
std::array<std::size_t, 3> apportion_sizes(std::size_t n, const std::array<double, 3>& fractions);

/// Seeded-shuffle partition of the records into train/public/private parts
/// sized by apportion_sizes.
RecordSplit split_records(std::span<const ResponseRecord> records,
                          const std::array<double, 3>& fractions, std::uint64_t seed);

/// As split_records, but partitions student ids; all of a student's records
/// travel together.
RecordSplit split_students(std::span<const ResponseRecord> records,
                           const std::array<double, 3>& fractions, std::uint64_t seed);

}  // namespace diagq::data
