#pragma once

#include <string>

namespace diagq::cli {

struct SplitOptions {
  std::string input;
  std::string mode = "records";  // records | students
  std::string fractions = "0.8,0.1,0.1";
  std::uint64_t seed = 0;
  std::string outdir = ".";
};
int cmd_split(const SplitOptions& options);

struct PrepOptions {
  std::string input;
  std::string answers;  // answer metadata csv, needed for deduplication
  std::size_t min_q = 50;
  std::size_t min_s = 50;
  bool lenient = false;
  std::string output;
};
int cmd_prep(const PrepOptions& options);

struct SimulateOptions {
  int students = 100;
  int questions = 50;
  double density = 0.5;
  std::uint64_t seed = 0;
  int groups = 5;
  int quizzes = 10;
  double confidence_noise = 5.0;
  std::string outdir = ".";
};
int cmd_simulate(const SimulateOptions& options);

struct TrainOptions {
  std::string input;
  std::string model = "irt";  // majority | irt | mf
  int task = 1;               // 1 (binary) | 2 (categorical, mf only)
  std::string output;
  std::string irt_kind = "2pl";
  int k = 8;
  int epochs = 200;
  double learning_rate = 1.0;
  double l2 = -1.0;  // negative: use the model's default
  std::uint64_t seed = 0;
};
int cmd_train(const TrainOptions& options);

struct EvalTaskOptions {
  std::string predictions;
  std::string truth;
  std::string outdir;  // empty: print only
};
int cmd_eval_task1(const EvalTaskOptions& options);
int cmd_eval_task2(const EvalTaskOptions& options);

struct EvalTask3Options {
  std::string ranking;
  std::string judgments;
};
int cmd_eval_task3(const EvalTask3Options& options);

struct RankOptions {
  std::string input;
  std::string answers;          // optional answer metadata csv
  std::string method = "entropy";  // entropy | confidence | weighted | average-rank
  std::string weights = "1,1,1,1,1";
  std::string output;
};
int cmd_rank(const RankOptions& options);

struct SubmitOptions {
  int task = 1;
  std::string model;    // tasks 1 and 2
  std::string ranking;  // task 3
  std::string template_csv;
  std::string outdir = ".";
};
int cmd_submit(const SubmitOptions& options);

struct EpisodeOptions {
  std::string model;
  std::string input;
  std::string policy = "random";  // random | max_uncertainty | fisher_information
  int budget = 10;
  std::uint64_t seed = 0;
  double target_fraction = 0.2;
  bool per_step_accuracy = false;
  std::string outdir = ".";
};
int cmd_episode(const EpisodeOptions& options);

}  // namespace diagq::cli
