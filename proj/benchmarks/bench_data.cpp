#include <benchmark/benchmark.h>

#include "diagq/csv.hpp"
#include "diagq/dataset.hpp"
#include "diagq/quality.hpp"
#include "diagq/synth.hpp"

namespace {

using namespace diagq;

synth::SynthConfig bench_config() {
  synth::SynthConfig config;
  config.n_students = 500;
  config.n_questions = 100;
  config.density = 0.5;
  config.seed = 1;
  return config;
}

const synth::SynthDataset& bench_dataset() {
  static const synth::SynthDataset dataset = [] {
    auto config = bench_config();
    return synth::sample_responses(synth::gen_ground_truth(config), config);
  }();
  return dataset;
}

void BM_csv_parse(benchmark::State& state) {
  csv::Table table;
  table.header = {"QuestionId", "UserId", "AnswerId", "AnswerValue", "CorrectAnswer", "IsCorrect"};
  for (const auto& r : bench_dataset().records) {
    table.rows.push_back({std::to_string(r.question_id), std::to_string(r.user_id),
                          std::to_string(r.answer_id), std::to_string(r.answer_value),
                          std::to_string(r.correct_answer), std::to_string(r.is_correct)});
  }
  std::string text = csv::to_string(table);
  for (auto _ : state) {
    benchmark::DoNotOptimize(csv::parse(text));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_csv_parse);

void BM_build_matrix(benchmark::State& state) {
  const auto& records = bench_dataset().records;
  for (auto _ : state) {
    benchmark::DoNotOptimize(data::ResponseMatrix::from_records(records));
  }
}
BENCHMARK(BM_build_matrix);

void BM_split_records(benchmark::State& state) {
  const auto& records = bench_dataset().records;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(data::split_records(records, {0.8, 0.1, 0.1}, seed++));
  }
}
BENCHMARK(BM_split_records);

void BM_quality_features(benchmark::State& state) {
  const auto& dataset = bench_dataset();
  std::unordered_map<data::Id, data::AnswerMeta> answers;
  for (const auto& a : dataset.answers) answers[a.answer_id] = a;
  for (auto _ : state) {
    benchmark::DoNotOptimize(quality::compute_quality_features(dataset.records, answers));
  }
}
BENCHMARK(BM_quality_features);

}  // namespace

BENCHMARK_MAIN();
