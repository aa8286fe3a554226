#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "diagq/records.hpp"

namespace diagq::synth {

using data::Id;

struct SynthConfig {
  int n_students = 100;
  int n_questions = 50;
  double density = 0.5;  // independent inclusion probability per cell
  std::uint64_t seed = 0;
  int n_groups = 5;
  int n_quizzes = 10;
  double confidence_noise = 5.0;  // stdev of the reported-confidence noise
};

/// Generating parameters with known truth: a 2PL response process plus
/// per-question distractor distributions and a noisy confidence link
/// (confidence = clamp(round(100 p + N(0, noise)), 0, 100)).
struct GroundTruth {
  std::vector<double> theta;  // per student, N(0,1)
  std::vector<double> a;      // per question, exp(N(0,0.25)) > 0
  std::vector<double> b;      // per question, N(0,1)
  std::vector<int> correct_option;                     // per question, 1..4
  std::vector<std::array<double, 3>> distractor_dist;  // over the 3 wrong options, ascending

  std::size_t n_students() const { return theta.size(); }
  std::size_t n_questions() const { return b.size(); }
};

GroundTruth gen_ground_truth(const SynthConfig& config);

/// The exact generating probability sigmoid(a (theta - b)); the reference for
/// calibration and Bayes-optimal baselines.
double oracle_probability(const GroundTruth& truth, int student, int question);

struct SynthDataset {
  std::vector<data::ResponseRecord> records;
  std::vector<data::AnswerMeta> answers;  // one per record, same order
  std::vector<data::StudentMeta> students;
  std::vector<data::QuestionMeta> questions;
  data::SubjectTree subjects;
};

/// Samples an answer log: each cell is present independently with probability
/// density; correctness is Bernoulli of the oracle probability; wrong answers
/// draw from the distractor distribution. Metadata (timestamps, groups,
/// quizzes, confidence, demographics) is generated alongside. Student ids are
/// 0..n-1 and question ids 0..m-1; answer ids are sequential.
SynthDataset sample_responses(const GroundTruth& truth, const SynthConfig& config);

/// Writes the full CSV file set (train_task_1_2.csv plus the four metadata
/// files) and ground_truth.csv into the directory.
void write_dataset_csvs(const SynthDataset& dataset, const GroundTruth& truth,
                        const std::filesystem::path& outdir);

}  // namespace diagq::synth
