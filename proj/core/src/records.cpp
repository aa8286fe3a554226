#include "diagq/records.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <unordered_set>

#include "diagq/csv.hpp"

namespace diagq::data {

bool record_invariants_hold(const ResponseRecord& r) noexcept {
  if (r.question_id < 0 || r.user_id < 0 || r.answer_id < 0) return false;
  if (r.answer_value < 1 || r.answer_value > 4) return false;
  if (r.correct_answer < 1 || r.correct_answer > 4) return false;
  if (r.is_correct != 0 && r.is_correct != 1) return false;
  return (r.answer_value == r.correct_answer) == (r.is_correct == 1);
}

void SubjectTree::add(Id subject_id, SubjectNode node) {
  if (!nodes_.emplace(subject_id, std::move(node)).second) {
    throw std::runtime_error("duplicate subject id " + std::to_string(subject_id));
  }
}

const SubjectNode* SubjectTree::find(Id subject_id) const {
  auto it = nodes_.find(subject_id);
  return it == nodes_.end() ? nullptr : &it->second;
}

void SubjectTree::validate() const {
  for (const auto& [id, node] : nodes_) {
    if (!node.parent_id) {
      if (node.level != 0) {
        throw std::runtime_error("root subject " + std::to_string(id) + " has level " +
                                 std::to_string(node.level));
      }
      continue;
    }
    const SubjectNode* parent = find(*node.parent_id);
    if (parent == nullptr) {
      throw std::runtime_error("subject " + std::to_string(id) + " has unknown parent " +
                               std::to_string(*node.parent_id));
    }
    if (node.level != parent->level + 1) {
      throw std::runtime_error("subject " + std::to_string(id) + " level " +
                               std::to_string(node.level) + " != parent level + 1");
    }
    // Walking to a root must terminate; the level rule bounds path length.
    Id cursor = id;
    std::size_t steps = 0;
    while (const SubjectNode* n = find(cursor)) {
      if (!n->parent_id) break;
      cursor = *n->parent_id;
      if (++steps > nodes_.size()) {
        throw std::runtime_error("subject tree contains a cycle through " + std::to_string(id));
      }
    }
  }
}

namespace {

struct RowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void fail_row(std::size_t row, const std::string& what) {
  // Row numbers are 1-based over data rows (header excluded).
  throw RowError("row " + std::to_string(row) + ": " + what);
}

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_missing(std::string_view s) {
  s = trimmed(s);
  return s.empty() || s == "NaN" || s == "nan" || s == "NA";
}

// Integer parse tolerating a float-style ".0" tail (real metadata exports
// carry PremiumPupil as 0.0/1.0).
std::int64_t parse_int(std::string_view raw, std::size_t row, std::string_view col) {
  std::string_view s = trimmed(raw);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec == std::errc{}) {
    std::string_view rest(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr));
    if (rest.empty()) return value;
    if (rest.front() == '.' && rest.size() > 1 &&
        rest.find_first_not_of('0', 1) == std::string_view::npos) {
      return value;
    }
  }
  fail_row(row, "non-integer " + std::string(col) + " '" + std::string(raw) + "'");
}

std::vector<Id> parse_id_list(std::string_view raw, std::size_t row) {
  std::string_view s = trimmed(raw);
  if (!s.empty() && s.front() == '[') s.remove_prefix(1);
  if (!s.empty() && s.back() == ']') s.remove_suffix(1);
  std::vector<Id> ids;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    std::string_view item = trimmed(s.substr(start, comma == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : comma - start));
    if (!item.empty()) ids.push_back(parse_int(item, row, "SubjectId"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return ids;
}

// Shared strict/lenient row loop: `consume` throws RowError on a bad row.
template <class Consume>
void for_each_row(const csv::Table& table, ParseMode mode, ParseStats* stats, Consume&& consume) {
  ParseStats local;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    ++local.rows_read;
    try {
      consume(table.rows[i], i + 1);
    } catch (const RowError&) {
      if (mode == ParseMode::strict) throw;
      ++local.rows_dropped;
    }
  }
  if (stats != nullptr) *stats = local;
}

}  // namespace

std::vector<ResponseRecord> parse_records(const std::filesystem::path& path, ParseMode mode,
                                          ParseStats* stats) {
  csv::Table table = csv::read_file(path);
  const std::size_t c_question = table.require_column("QuestionId");
  const std::size_t c_user = table.require_column("UserId");
  const std::size_t c_answer = table.require_column("AnswerId");
  const std::size_t c_value = table.require_column("AnswerValue");
  const std::size_t c_correct = table.require_column("CorrectAnswer");
  const std::size_t c_flag = table.require_column("IsCorrect");

  std::vector<ResponseRecord> records;
  records.reserve(table.rows.size());
  for_each_row(table, mode, stats, [&](const std::vector<std::string>& row, std::size_t n) {
    ResponseRecord r;
    r.question_id = parse_int(row.at(c_question), n, "QuestionId");
    r.user_id = parse_int(row.at(c_user), n, "UserId");
    r.answer_id = parse_int(row.at(c_answer), n, "AnswerId");
    r.answer_value = static_cast<int>(parse_int(row.at(c_value), n, "AnswerValue"));
    r.correct_answer = static_cast<int>(parse_int(row.at(c_correct), n, "CorrectAnswer"));
    r.is_correct = static_cast<int>(parse_int(row.at(c_flag), n, "IsCorrect"));
    if (!record_invariants_hold(r)) fail_row(n, "record violates answer-record invariants");
    records.push_back(r);
  });
  return records;
}

std::vector<StudentMeta> parse_student_metadata(const std::filesystem::path& path, ParseMode mode,
                                                ParseStats* stats) {
  csv::Table table = csv::read_file(path);
  const std::size_t c_user = table.require_column("UserId");
  const std::size_t c_gender = table.require_column("Gender");
  const std::size_t c_dob = table.require_column("DateOfBirth");
  const std::size_t c_premium = table.require_column("PremiumPupil");

  std::vector<StudentMeta> students;
  students.reserve(table.rows.size());
  for_each_row(table, mode, stats, [&](const std::vector<std::string>& row, std::size_t n) {
    StudentMeta s;
    s.user_id = parse_int(row.at(c_user), n, "UserId");
    s.gender = static_cast<int>(parse_int(row.at(c_gender), n, "Gender"));
    if (s.gender < 0 || s.gender > 3) fail_row(n, "gender code out of {0,1,2,3}");
    if (!is_missing(row.at(c_dob))) {
      Date dob;
      try {
        dob = parse_date(row.at(c_dob));
      } catch (const std::exception& e) {
        fail_row(n, e.what());
      }
      if (dob.day != 1) fail_row(n, "DateOfBirth not rounded to the first of the month");
      s.date_of_birth = dob;
    }
    if (!is_missing(row.at(c_premium))) {
      int premium = static_cast<int>(parse_int(row.at(c_premium), n, "PremiumPupil"));
      if (premium != 0 && premium != 1) fail_row(n, "PremiumPupil must be 0 or 1");
      s.premium_pupil = premium;
    }
    students.push_back(s);
  });
  return students;
}

std::unordered_map<Id, AnswerMeta> parse_answer_metadata(const std::filesystem::path& path,
                                                         ParseMode mode, ParseStats* stats) {
  csv::Table table = csv::read_file(path);
  const std::size_t c_answer = table.require_column("AnswerId");
  const std::size_t c_date = table.require_column("DateAnswered");
  const std::size_t c_confidence = table.require_column("Confidence");
  const std::size_t c_group = table.require_column("GroupId");
  const std::size_t c_quiz = table.require_column("QuizId");
  const std::size_t c_scheme = table.require_column("SchemeOfWorkId");

  std::unordered_map<Id, AnswerMeta> answers;
  answers.reserve(table.rows.size());
  for_each_row(table, mode, stats, [&](const std::vector<std::string>& row, std::size_t n) {
    AnswerMeta a;
    a.answer_id = parse_int(row.at(c_answer), n, "AnswerId");
    try {
      a.date_answered = parse_timestamp(row.at(c_date));
    } catch (const std::exception& e) {
      fail_row(n, e.what());
    }
    if (!is_missing(row.at(c_confidence))) {
      int confidence = static_cast<int>(parse_int(row.at(c_confidence), n, "Confidence"));
      if (confidence < 0 || confidence > 100) fail_row(n, "Confidence outside [0,100]");
      a.confidence = confidence;
    }
    a.group_id = parse_int(row.at(c_group), n, "GroupId");
    a.quiz_id = parse_int(row.at(c_quiz), n, "QuizId");
    a.scheme_of_work_id = parse_int(row.at(c_scheme), n, "SchemeOfWorkId");
    if (!answers.emplace(a.answer_id, a).second) {
      fail_row(n, "duplicate AnswerId " + std::to_string(a.answer_id));
    }
  });
  return answers;
}

std::vector<QuestionMeta> parse_question_metadata(const std::filesystem::path& path, ParseMode mode,
                                                  ParseStats* stats) {
  csv::Table table = csv::read_file(path);
  const std::size_t c_question = table.require_column("QuestionId");
  const std::size_t c_subject = table.require_column("SubjectId");

  std::vector<QuestionMeta> questions;
  questions.reserve(table.rows.size());
  for_each_row(table, mode, stats, [&](const std::vector<std::string>& row, std::size_t n) {
    QuestionMeta q;
    q.question_id = parse_int(row.at(c_question), n, "QuestionId");
    q.subject_ids = parse_id_list(row.at(c_subject), n);
    if (q.subject_ids.empty()) fail_row(n, "question lists no subjects");
    questions.push_back(std::move(q));
  });
  return questions;
}

SubjectTree parse_subject_metadata(const std::filesystem::path& path) {
  csv::Table table = csv::read_file(path);
  const std::size_t c_subject = table.require_column("SubjectId");
  const std::size_t c_name = table.require_column("Name");
  const std::size_t c_parent = table.require_column("ParentId");
  const std::size_t c_level = table.require_column("Level");

  SubjectTree tree;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t n = i + 1;
    SubjectNode node;
    Id id = parse_int(row.at(c_subject), n, "SubjectId");
    node.name = row.at(c_name);
    if (!is_missing(row.at(c_parent))) {
      node.parent_id = parse_int(row.at(c_parent), n, "ParentId");
    }
    node.level = static_cast<int>(parse_int(row.at(c_level), n, "Level"));
    tree.add(id, std::move(node));
  }
  tree.validate();
  return tree;
}

void validate_questions_against_tree(std::span<const QuestionMeta> questions,
                                     const SubjectTree& tree) {
  for (const auto& q : questions) {
    if (q.subject_ids.empty()) {
      throw std::runtime_error("question " + std::to_string(q.question_id) + " lists no subjects");
    }
    for (Id s : q.subject_ids) {
      if (!tree.contains(s)) {
        throw std::runtime_error("question " + std::to_string(q.question_id) +
                                 " references unknown subject " + std::to_string(s));
      }
    }
  }
}

void write_records(const std::filesystem::path& path, std::span<const ResponseRecord> records) {
  csv::Table table;
  table.header = {"QuestionId", "UserId", "AnswerId", "AnswerValue", "CorrectAnswer", "IsCorrect"};
  table.rows.reserve(records.size());
  for (const auto& r : records) {
    table.rows.push_back({std::to_string(r.question_id), std::to_string(r.user_id),
                          std::to_string(r.answer_id), std::to_string(r.answer_value),
                          std::to_string(r.correct_answer), std::to_string(r.is_correct)});
  }
  csv::write_file(path, table);
}

void write_student_metadata(const std::filesystem::path& path,
                            std::span<const StudentMeta> students) {
  csv::Table table;
  table.header = {"UserId", "Gender", "DateOfBirth", "PremiumPupil"};
  table.rows.reserve(students.size());
  for (const auto& s : students) {
    table.rows.push_back({std::to_string(s.user_id), std::to_string(s.gender),
                          s.date_of_birth ? format_date(*s.date_of_birth) : std::string{},
                          s.premium_pupil ? std::to_string(*s.premium_pupil) : std::string{}});
  }
  csv::write_file(path, table);
}

void write_answer_metadata(const std::filesystem::path& path,
                           std::span<const AnswerMeta> answers) {
  csv::Table table;
  table.header = {"AnswerId", "DateAnswered", "Confidence", "GroupId", "QuizId", "SchemeOfWorkId"};
  table.rows.reserve(answers.size());
  for (const auto& a : answers) {
    table.rows.push_back({std::to_string(a.answer_id), format_timestamp(a.date_answered),
                          a.confidence ? std::to_string(*a.confidence) : std::string{},
                          std::to_string(a.group_id), std::to_string(a.quiz_id),
                          std::to_string(a.scheme_of_work_id)});
  }
  csv::write_file(path, table);
}

void write_question_metadata(const std::filesystem::path& path,
                             std::span<const QuestionMeta> questions) {
  csv::Table table;
  table.header = {"QuestionId", "SubjectId"};
  table.rows.reserve(questions.size());
  for (const auto& q : questions) {
    std::string subjects = "[";
    for (std::size_t i = 0; i < q.subject_ids.size(); ++i) {
      if (i != 0) subjects += ", ";
      subjects += std::to_string(q.subject_ids[i]);
    }
    subjects += "]";
    table.rows.push_back({std::to_string(q.question_id), std::move(subjects)});
  }
  csv::write_file(path, table);
}

void write_subject_metadata(const std::filesystem::path& path, const SubjectTree& tree) {
  std::vector<std::pair<Id, const SubjectNode*>> ordered;
  ordered.reserve(tree.size());
  for (const auto& [id, node] : tree.nodes()) ordered.emplace_back(id, &node);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  csv::Table table;
  table.header = {"SubjectId", "Name", "ParentId", "Level"};
  table.rows.reserve(ordered.size());
  for (const auto& [id, node] : ordered) {
    table.rows.push_back({std::to_string(id), node->name,
                          node->parent_id ? std::to_string(*node->parent_id) : std::string{},
                          std::to_string(node->level)});
  }
  csv::write_file(path, table);
}

}  // namespace diagq::data
