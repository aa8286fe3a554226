#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "diagq/time.hpp"

namespace diagq::data {

using Id = std::int64_t;

/// One answer event: a student chose one of four options on a question.
struct ResponseRecord {
  Id question_id = 0;
  Id user_id = 0;
  Id answer_id = 0;
  int answer_value = 0;    // chosen option, 1..4
  int correct_answer = 0;  // correct option, 1..4
  int is_correct = 0;      // 1 iff answer_value == correct_answer
};

bool record_invariants_hold(const ResponseRecord& r) noexcept;

/// Gender codes: 0 unspecified, 1 female, 2 male, 3 other.
struct StudentMeta {
  Id user_id = 0;
  int gender = 0;
  std::optional<Date> date_of_birth;  // always first of the month
  std::optional<int> premium_pupil;   // 0 or 1
};

struct AnswerMeta {
  Id answer_id = 0;
  Timestamp date_answered{};
  std::optional<int> confidence;  // self-reported, 0..100
  Id group_id = 0;
  Id quiz_id = 0;
  Id scheme_of_work_id = 0;
};

struct QuestionMeta {
  Id question_id = 0;
  std::vector<Id> subject_ids;  // non-empty, resolve in the subject tree
};

struct SubjectNode {
  std::string name;
  std::optional<Id> parent_id;  // absent for roots
  int level = 0;                // root level 0, child = parent + 1
};

/// Forest of subject nodes. validate() checks parent resolution, acyclicity
/// and the level = parent.level + 1 rule.
class SubjectTree {
 public:
  void add(Id subject_id, SubjectNode node);
  void validate() const;

  const SubjectNode* find(Id subject_id) const;
  bool contains(Id subject_id) const { return find(subject_id) != nullptr; }
  std::size_t size() const { return nodes_.size(); }
  const std::unordered_map<Id, SubjectNode>& nodes() const { return nodes_; }

 private:
  std::unordered_map<Id, SubjectNode> nodes_;
};

enum class ParseMode { strict, lenient };

struct ParseStats {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;  // lenient mode only
};

/// Reads answer-record CSV (QuestionId, UserId, AnswerId, AnswerValue,
/// CorrectAnswer, IsCorrect in any column order). Strict mode aborts with a
/// row-numbered error on any invariant violation; lenient mode drops and
/// counts the offending rows.
std::vector<ResponseRecord> parse_records(const std::filesystem::path& path,
                                          ParseMode mode = ParseMode::strict,
                                          ParseStats* stats = nullptr);

std::vector<StudentMeta> parse_student_metadata(const std::filesystem::path& path,
                                                ParseMode mode = ParseMode::strict,
                                                ParseStats* stats = nullptr);

std::unordered_map<Id, AnswerMeta> parse_answer_metadata(const std::filesystem::path& path,
                                                         ParseMode mode = ParseMode::strict,
                                                         ParseStats* stats = nullptr);

std::vector<QuestionMeta> parse_question_metadata(const std::filesystem::path& path,
                                                  ParseMode mode = ParseMode::strict,
                                                  ParseStats* stats = nullptr);

SubjectTree parse_subject_metadata(const std::filesystem::path& path);

/// Throws if any question lists no subjects or references an unknown subject.
void validate_questions_against_tree(std::span<const QuestionMeta> questions,
                                     const SubjectTree& tree);

void write_records(const std::filesystem::path& path, std::span<const ResponseRecord> records);
void write_student_metadata(const std::filesystem::path& path, std::span<const StudentMeta> students);
void write_answer_metadata(const std::filesystem::path& path, std::span<const AnswerMeta> answers);
void write_question_metadata(const std::filesystem::path& path, std::span<const QuestionMeta> questions);
void write_subject_metadata(const std::filesystem::path& path, const SubjectTree& tree);

}  // namespace diagq::data
