#include <iostream>

#include <json.hpp>

#include "cli_util.hpp"
#include "commands.hpp"
#include "diagq/adaptive.hpp"
#include "diagq/csv.hpp"
#include "diagq/model_io.hpp"

namespace diagq::cli {

namespace {

using data::Id;

adaptive::PolicyKind parse_policy(const std::string& name) {
  if (name == "random") return adaptive::PolicyKind::random;
  if (name == "max_uncertainty") return adaptive::PolicyKind::max_uncertainty;
  if (name == "fisher_information") return adaptive::PolicyKind::fisher_information;
  throw std::invalid_argument(
      "policy must be 'random', 'max_uncertainty' or 'fisher_information'");
}

}  // namespace

int cmd_episode(const EpisodeOptions& options) {
  auto artifact = resolve_model_artifact(options.model);
  auto records = data::parse_records(options.input);
  auto matrix = data::ResponseMatrix::from_records(records);
  adaptive::MatrixEnvironment environment(matrix);

  auto masks = adaptive::derive_masks(matrix, options.target_fraction, options.seed);
  auto state = adaptive::SelectionState::init(matrix.student_ids(), masks.candidates,
                                              masks.targets, options.budget);

  // IRT artifacts update per-student abilities online; anything else runs
  // with no-op updates.
  std::unique_ptr<adaptive::AdaptiveModel> model;
  std::unique_ptr<models::Predictor> static_model;
  if (models::peek_model_kind(artifact) == models::ModelKind::irt) {
    model = std::make_unique<adaptive::IrtAdaptiveModel>(models::load_irt(artifact));
  } else {
    static_model = models::load_predictor(artifact);
    model = std::make_unique<adaptive::StaticAdaptiveModel>(*static_model);
  }

  adaptive::SelectionPolicy policy(parse_policy(options.policy), options.seed);
  auto result = adaptive::run_episode(*model, environment, std::move(state), policy,
                                      options.per_step_accuracy);

  std::string trace_text;
  for (const auto& step : result.trace) {
    nlohmann::json line;
    line["step"] = step.step;
    auto& selections = line["selections"] = nlohmann::json::object();
    for (const auto& [student, question] : step.selections) {
      selections[std::to_string(student)] = question;
    }
    if (step.accuracy) line["accuracy"] = *step.accuracy;
    trace_text += line.dump() + "\n";
  }
  nlohmann::json summary;
  summary["final_accuracy"] = result.final_accuracy;
  summary["budget"] = options.budget;
  summary["students"] = matrix.n_students();
  summary["policy"] = options.policy;
  summary["seed"] = options.seed;
  trace_text += summary.dump() + "\n";

  std::filesystem::create_directories(options.outdir);
  auto trace_path = std::filesystem::path(options.outdir) / "episode_trace.jsonl";
  csv::write_text_file(trace_path, trace_text);

  for (std::size_t s = 0; s < matrix.n_students(); ++s) {
    Id student = matrix.student_id(s);
    std::cout << "student " << student << ":";
    for (Id question : result.selected.at(student)) std::cout << " " << question;
    std::cout << "\n";
  }
  std::cout << "final_accuracy: " << result.final_accuracy << "\n"
            << "trace: " << trace_path.string() << "\n";
  return 0;
}

}  // namespace diagq::cli
