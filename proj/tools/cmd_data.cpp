#include <iostream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "diagq/dataset.hpp"
#include "diagq/synth.hpp"

namespace diagq::cli {

int cmd_split(const SplitOptions& options) {
  auto records = data::parse_records(options.input);
  auto fractions = parse_fractions(options.fractions);

  data::RecordSplit split;
  if (options.mode == "records") {
    split = data::split_records(records, fractions, options.seed);
  } else if (options.mode == "students") {
    split = data::split_students(records, fractions, options.seed);
  } else {
    throw std::invalid_argument("mode must be 'records' or 'students'");
  }

  std::filesystem::create_directories(options.outdir);
  std::filesystem::path outdir(options.outdir);
  data::write_records(outdir / "train.csv", split.train);
  data::write_records(outdir / "public_test.csv", split.public_test);
  data::write_records(outdir / "private_test.csv", split.private_test);

  std::cout << "train: " << split.train.size() << "\n"
            << "public_test: " << split.public_test.size() << "\n"
            << "private_test: " << split.private_test.size() << "\n";
  return 0;
}

int cmd_prep(const PrepOptions& options) {
  data::ParseStats stats;
  auto mode = options.lenient ? data::ParseMode::lenient : data::ParseMode::strict;
  auto records = data::parse_records(options.input, mode, &stats);
  log_info("parsed " + std::to_string(stats.rows_read) + " rows, dropped " +
           std::to_string(stats.rows_dropped));

  auto answers = data::parse_answer_metadata(options.answers, mode);
  auto deduped = data::dedupe_latest(records, answers);
  log_info("dedupe: " + std::to_string(records.size()) + " -> " +
           std::to_string(deduped.size()));

  auto filtered = data::filter_min_counts(deduped, options.min_q, options.min_s);
  log_info("filter_min_counts(" + std::to_string(options.min_q) + "," +
           std::to_string(options.min_s) + "): " + std::to_string(deduped.size()) + " -> " +
           std::to_string(filtered.size()));

  data::write_records(options.output, filtered);
  std::cout << "records: " << filtered.size() << "\n";
  return 0;
}

int cmd_simulate(const SimulateOptions& options) {
  synth::SynthConfig config;
  config.n_students = options.students;
  config.n_questions = options.questions;
  config.density = options.density;
  config.seed = options.seed;
  config.n_groups = options.groups;
  config.n_quizzes = options.quizzes;
  config.confidence_noise = options.confidence_noise;

  auto truth = synth::gen_ground_truth(config);
  auto dataset = synth::sample_responses(truth, config);
  synth::write_dataset_csvs(dataset, truth, options.outdir);

  double correct = 0;
  for (const auto& r : dataset.records) correct += r.is_correct;
  double cells = static_cast<double>(options.students) * options.questions;
  std::cout << "records: " << dataset.records.size() << "\n"
            << "density: " << static_cast<double>(dataset.records.size()) / cells << "\n"
            << "correctness_rate: "
            << (dataset.records.empty() ? 0.0 : correct / static_cast<double>(dataset.records.size()))
            << "\n";
  return 0;
}

}  // namespace diagq::cli
