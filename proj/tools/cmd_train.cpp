#include <iostream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "diagq/model_io.hpp"

namespace diagq::cli {

int cmd_train(const TrainOptions& options) {
  auto records = data::parse_records(options.input);
  auto matrix = data::ResponseMatrix::from_records(records);
  log_info("matrix: " + std::to_string(matrix.n_students()) + " students x " +
           std::to_string(matrix.n_questions()) + " questions, " +
           std::to_string(matrix.n_observed()) + " observed");

  const std::filesystem::path output(options.output);
  if (options.model == "majority") {
    models::save_model(output, models::MajorityModel::fit(matrix));
  } else if (options.model == "irt") {
    if (options.task != 1) throw std::invalid_argument("irt supports task 1 only");
    models::IrtConfig config;
    config.kind = options.irt_kind == "1pl" ? models::IrtKind::one_pl : models::IrtKind::two_pl;
    config.epochs = options.epochs;
    config.learning_rate = options.learning_rate;
    if (options.l2 >= 0) config.l2 = options.l2;
    config.seed = options.seed;
    auto model = models::IrtModel::fit(matrix, config);
    log_info("final loss: " + std::to_string(model.loss_curve().back()));
    models::save_model(output, model);
  } else if (options.model == "mf") {
    models::MfConfig config;
    config.k = options.k;
    config.epochs = options.epochs;
    config.learning_rate = options.learning_rate;
    if (options.l2 >= 0) config.l2 = options.l2;
    config.seed = options.seed;
    config.mode = options.task == 2 ? models::PredictionMode::categorical
                                    : models::PredictionMode::binary;
    auto model = models::MfModel::fit(matrix, config);
    for (const auto& warning : model.warnings()) log_warn(warning);
    log_info("final loss: " + std::to_string(model.loss_curve().back()));
    models::save_model(output, model);
  } else {
    throw std::invalid_argument("model must be 'majority', 'irt' or 'mf'");
  }
  std::cout << "saved: " << options.output << "\n";
  return 0;
}

}  // namespace diagq::cli
