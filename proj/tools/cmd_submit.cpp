#include <charconv>
#include <iostream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "diagq/csv.hpp"
#include "diagq/model_io.hpp"
#include "diagq/quality.hpp"

namespace diagq::cli {

namespace {

using data::Id;

std::int64_t to_int(const std::string& s, const std::string& what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("invalid " + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

int cmd_submit(const SubmitOptions& options) {
  csv::Table template_table = csv::read_file(options.template_csv);
  std::filesystem::create_directories(options.outdir);
  std::filesystem::path out =
      std::filesystem::path(options.outdir) / ("submission_task_" + std::to_string(options.task) +
                                               ".csv");

  csv::Table submission;
  if (options.task == 1 || options.task == 2) {
    if (options.model.empty()) throw std::invalid_argument("tasks 1 and 2 need --model");
    auto model = load_artifact(options.model);
    const std::size_t c_user = template_table.require_column("UserId");
    const std::size_t c_question = template_table.require_column("QuestionId");

    std::vector<std::pair<Id, Id>> pairs;
    pairs.reserve(template_table.rows.size());
    for (const auto& row : template_table.rows) {
      pairs.emplace_back(to_int(row.at(c_user), "UserId"),
                         to_int(row.at(c_question), "QuestionId"));
    }
    auto mode = options.task == 1 ? models::PredictionMode::binary
                                  : models::PredictionMode::categorical;
    models::PredictionSet predictions;
    try {
      predictions = models::predict_pairs(*model, pairs, mode);
    } catch (const std::out_of_range& e) {
      throw std::runtime_error(std::string("template/question-set mismatch: ") + e.what());
    }

    submission.header = {"UserId", "QuestionId",
                         options.task == 1 ? "IsCorrect" : "AnswerValue"};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      submission.rows.push_back({std::to_string(pairs[i].first),
                                 std::to_string(pairs[i].second),
                                 std::to_string(predictions.labels[i])});
    }
  } else if (options.task == 3) {
    if (options.ranking.empty()) throw std::invalid_argument("task 3 needs --ranking");
    auto ranking = quality::read_ranking_csv(options.ranking);
    const std::size_t c_question = template_table.require_column("QuestionId");
    if (template_table.rows.size() != ranking.size()) {
      throw std::runtime_error("template/question-set mismatch: template lists " +
                               std::to_string(template_table.rows.size()) +
                               " questions, ranking covers " + std::to_string(ranking.size()));
    }
    submission.header = {"QuestionId", "ranking"};
    for (const auto& row : template_table.rows) {
      Id question = to_int(row.at(c_question), "QuestionId");
      if (!ranking.contains(question)) {
        throw std::runtime_error("template/question-set mismatch: question " +
                                 std::to_string(question) + " missing from the ranking");
      }
      submission.rows.push_back({std::to_string(question),
                                 std::to_string(ranking.rank_of(question))});
    }
  } else {
    throw std::invalid_argument("task must be 1, 2 or 3");
  }

  csv::write_file(out, submission);
  std::cout << "submission: " << out.string() << "\n"
            << "rows: " << submission.rows.size() << "\n";
  return 0;
}

}  // namespace diagq::cli
