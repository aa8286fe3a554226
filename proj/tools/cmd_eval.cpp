#include <charconv>
#include <iomanip>
#include <iostream>
#include <limits>

#include "cli_util.hpp"
#include "commands.hpp"
#include "diagq/csv.hpp"
#include "diagq/metrics.hpp"
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

struct PairHash {
  std::size_t operator()(const std::pair<Id, Id>& p) const {
    std::size_t h = std::hash<Id>{}(p.first);
    return h ^ (std::hash<Id>{}(p.second) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
  }
};

// Shared task-1/2 scorer; only the prediction column and label domain differ.
int eval_prediction_task(const EvalTaskOptions& options, const std::string& column, int label_lo,
                         int label_hi, int n_classes, int label_base,
                         const std::string& score_name) {
  csv::Table truth = csv::read_file(options.truth);
  const std::size_t t_user = truth.require_column("UserId");
  const std::size_t t_question = truth.require_column("QuestionId");
  const std::size_t t_value = truth.require_column(column);

  csv::Table predictions = csv::read_file(options.predictions);
  const std::size_t p_user = predictions.require_column("UserId");
  const std::size_t p_question = predictions.require_column("QuestionId");
  if (!predictions.column(column)) {
    throw std::runtime_error("prediction column must be named " + column);
  }
  const std::size_t p_value = *predictions.column(column);

  std::unordered_map<std::pair<Id, Id>, int, PairHash> predicted;
  predicted.reserve(predictions.rows.size());
  for (const auto& row : predictions.rows) {
    std::pair<Id, Id> key{to_int(row.at(p_user), "UserId"), to_int(row.at(p_question), "QuestionId")};
    int value = static_cast<int>(to_int(row.at(p_value), column));
    if (value < label_lo || value > label_hi) {
      throw std::runtime_error(column + " value " + std::to_string(value) + " out of domain [" +
                               std::to_string(label_lo) + "," + std::to_string(label_hi) + "]");
    }
    if (!predicted.emplace(key, value).second) {
      throw std::runtime_error("duplicate prediction for (UserId " + std::to_string(key.first) +
                               ", QuestionId " + std::to_string(key.second) + ")");
    }
  }

  std::vector<int> predicted_labels, truth_labels;
  predicted_labels.reserve(truth.rows.size());
  for (const auto& row : truth.rows) {
    std::pair<Id, Id> key{to_int(row.at(t_user), "UserId"), to_int(row.at(t_question), "QuestionId")};
    auto it = predicted.find(key);
    if (it == predicted.end()) {
      throw std::runtime_error("missing prediction for (UserId " + std::to_string(key.first) +
                               ", QuestionId " + std::to_string(key.second) + ")");
    }
    predicted_labels.push_back(it->second);
    truth_labels.push_back(static_cast<int>(to_int(row.at(t_value), column)));
  }

  double score = models::accuracy(predicted_labels, truth_labels);
  auto confusion = models::confusion_matrix(predicted_labels, truth_labels, n_classes, label_base);
  // Full precision so the printed score is exactly the library value.
  std::cout << std::setprecision(std::numeric_limits<double>::max_digits10) << score_name << ": "
            << score << "\n";

  if (!options.outdir.empty()) {
    std::filesystem::create_directories(options.outdir);
    std::filesystem::path outdir(options.outdir);
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g\n", score);
    csv::write_text_file(outdir / "score.txt", buffer);

    csv::Table table;
    table.header = {"truth\\predicted"};
    for (int c = 0; c < n_classes; ++c) {
      table.header.push_back(std::to_string(c + label_base));
    }
    for (int r = 0; r < n_classes; ++r) {
      std::vector<std::string> row{std::to_string(r + label_base)};
      for (int c = 0; c < n_classes; ++c) {
        row.push_back(std::to_string(confusion[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]));
      }
      table.rows.push_back(std::move(row));
    }
    csv::write_file(outdir / "confusion_matrix.csv", table);
    log_info("score and confusion matrix written to " + options.outdir);
  }
  return 0;
}

}  // namespace

int cmd_eval_task1(const EvalTaskOptions& options) {
  return eval_prediction_task(options, "IsCorrect", 0, 1, 2, 0, "accuracy");
}

int cmd_eval_task2(const EvalTaskOptions& options) {
  return eval_prediction_task(options, "AnswerValue", 1, 4, 4, 1, "accuracy");
}

int cmd_eval_task3(const EvalTask3Options& options) {
  auto ranking = quality::read_ranking_csv(options.ranking);
  auto judgments = quality::read_judgments_csv(options.judgments);
  std::cout << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Id expert : judgments.experts()) {
    std::cout << "A_" << expert << ": " << quality::agreement_fraction(ranking, judgments, expert)
              << "\n";
  }
  auto [a_max, expert] = quality::max_agreement(ranking, judgments);
  std::cout << "A_max: " << a_max << " (expert " << expert << ")\n";
  return 0;
}

}  // namespace diagq::cli
