#include <benchmark/benchmark.h>

#include "diagq/adaptive.hpp"
#include "diagq/features.hpp"
#include "diagq/irt.hpp"
#include "diagq/mf.hpp"
#include "diagq/synth.hpp"

namespace {

using namespace diagq;
using data::Id;

const data::ResponseMatrix& bench_matrix() {
  static const data::ResponseMatrix matrix = [] {
    synth::SynthConfig config;
    config.n_students = 500;
    config.n_questions = 200;
    config.density = 0.8;
    config.seed = 7;
    auto truth = synth::gen_ground_truth(config);
    return data::ResponseMatrix::from_records(synth::sample_responses(truth, config).records);
  }();
  return matrix;
}

void BM_irt_objective(benchmark::State& state) {
  const auto& matrix = bench_matrix();
  std::vector<double> params(models::irt_parameter_count(matrix, models::IrtKind::two_pl), 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        models::irt_objective(matrix, params, models::IrtKind::two_pl, 1.0));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * matrix.n_observed()));
}
BENCHMARK(BM_irt_objective);

void BM_irt_gradient(benchmark::State& state) {
  const auto& matrix = bench_matrix();
  std::vector<double> params(models::irt_parameter_count(matrix, models::IrtKind::two_pl), 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        models::irt_gradient(matrix, params, models::IrtKind::two_pl, 1.0));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * matrix.n_observed()));
}
BENCHMARK(BM_irt_gradient);

void BM_mf_fit_epoch(benchmark::State& state) {
  const auto& matrix = bench_matrix();
  models::MfConfig config;
  config.k = static_cast<int>(state.range(0));
  config.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(models::MfModel::fit(matrix, config));
  }
}
BENCHMARK(BM_mf_fit_epoch)->Arg(4)->Arg(16);

void BM_svd_features(benchmark::State& state) {
  const auto& matrix = bench_matrix();
  for (auto _ : state) {
    benchmark::DoNotOptimize(models::svd_features(matrix, 16));
  }
}
BENCHMARK(BM_svd_features);

void BM_episode(benchmark::State& state) {
  const auto& matrix = bench_matrix();
  adaptive::MatrixEnvironment environment(matrix);

  models::IrtConfig config;
  config.epochs = 60;
  auto fitted = models::IrtModel::fit(bench_matrix(), config);

  std::vector<Id> students;
  std::unordered_map<Id, std::vector<Id>> candidates, targets;
  for (std::size_t s = 0; s < 100; ++s) {
    Id student = matrix.student_id(s);
    students.push_back(student);
    for (const auto& cell : matrix.row(s)) {
      Id q = matrix.question_id(static_cast<std::size_t>(cell.question));
      (candidates[student].size() < 80 ? candidates[student] : targets[student]).push_back(q);
    }
  }
  auto initial = adaptive::SelectionState::init(students, candidates, targets, 10);

  std::uint64_t seed = 0;
  for (auto _ : state) {
    adaptive::IrtAdaptiveModel model(fitted);
    adaptive::SelectionPolicy policy(adaptive::PolicyKind::fisher_information, seed++);
    benchmark::DoNotOptimize(
        adaptive::run_episode(model, environment, initial, policy));
  }
}
BENCHMARK(BM_episode);

}  // namespace

BENCHMARK_MAIN();
