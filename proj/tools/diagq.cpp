#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli_util.hpp"
#include "commands.hpp"

namespace {

using namespace diagq::cli;

// Subcommand callbacks only record what to run; execution happens after the
// resolved configuration has been logged.
using Runner = std::function<int()>;

void add_split(CLI::App& app, SplitOptions& options, Runner& run) {
  auto* cmd = app.add_subcommand("split", "Split answer records into train/public/private sets");
  cmd->add_option("--input", options.input, "Answer-record CSV")->required();
  cmd->add_option("--mode", options.mode, "Partition unit: records or students")
      ->check(CLI::IsMember({"records", "students"}))
      ->capture_default_str();
  cmd->add_option("--fractions", options.fractions, "Train/public/private fractions")
      ->capture_default_str();
  cmd->add_option("--seed", options.seed, "Shuffle seed")->capture_default_str();
  cmd->add_option("--outdir", options.outdir, "Output directory")->capture_default_str();
  cmd->callback([&] { run = [&] { return cmd_split(options); }; });
}

void add_prep(CLI::App& app, PrepOptions& options, Runner& run) {
  auto* cmd = app.add_subcommand(
      "prep", "Deduplicate to the latest answer per pair and apply min-count filtering");
  cmd->add_option("--input", options.input, "Answer-record CSV")->required();
  cmd->add_option("--answers", options.answers, "Answer metadata CSV")->required();
  cmd->add_option("--min-q", options.min_q, "Minimum answers per question")
      ->capture_default_str();
  cmd->add_option("--min-s", options.min_s, "Minimum answers per student")
      ->capture_default_str();
  cmd->add_flag("--lenient", options.lenient, "Drop malformed rows instead of aborting");
  cmd->add_option("--out", options.output, "Cleaned records CSV")->required();
  cmd->callback([&] { run = [&] { return cmd_prep(options); }; });
}

void add_simulate(CLI::App& app, SimulateOptions& options, Runner& run) {
  auto* cmd = app.add_subcommand("simulate",
                                 "Generate a synthetic dataset with known ground truth");
  cmd->add_option("--students", options.students)->capture_default_str();
  cmd->add_option("--questions", options.questions)->capture_default_str();
  cmd->add_option("--density", options.density)->capture_default_str();
  cmd->add_option("--seed", options.seed)->capture_default_str();
  cmd->add_option("--groups", options.groups)->capture_default_str();
  cmd->add_option("--quizzes", options.quizzes)->capture_default_str();
  cmd->add_option("--confidence-noise", options.confidence_noise)->capture_default_str();
  cmd->add_option("--outdir", options.outdir, "Output directory")->capture_default_str();
  cmd->callback([&] { run = [&] { return cmd_simulate(options); }; });
}

void add_train(CLI::App& app, TrainOptions& options, Runner& run) {
  auto* cmd = app.add_subcommand("train", "Fit a model and save a checkpoint");
  cmd->add_option("--input", options.input, "Training records CSV")->required();
  cmd->add_option("--model", options.model, "majority, irt or mf")
      ->check(CLI::IsMember({"majority", "irt", "mf"}))
      ->capture_default_str();
  cmd->add_option("--task", options.task, "1 = binary, 2 = categorical (mf only)")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  cmd->add_option("--out", options.output, "Checkpoint path")->required();
  cmd->add_option("--irt-kind", options.irt_kind, "1pl or 2pl")
      ->check(CLI::IsMember({"1pl", "2pl"}))
      ->capture_default_str();
  cmd->add_option("--k", options.k, "Factor dimension (mf)")->capture_default_str();
  cmd->add_option("--epochs", options.epochs)->capture_default_str();
  cmd->add_option("--lr", options.learning_rate, "Initial step size")->capture_default_str();
  cmd->add_option("--l2", options.l2, "L2 penalty (negative: model default)")
      ->capture_default_str();
  cmd->add_option("--seed", options.seed)->capture_default_str();
  cmd->callback([&] { run = [&] { return cmd_train(options); }; });
}

void add_eval(CLI::App& app, EvalTaskOptions& task1, EvalTaskOptions& task2,
              EvalTask3Options& task3, Runner& run) {
  auto* cmd1 = app.add_subcommand("eval-task1", "Score binary correctness predictions");
  cmd1->add_option("--predictions", task1.predictions, "Prediction CSV (IsCorrect)")->required();
  cmd1->add_option("--truth", task1.truth, "Held-out truth CSV")->required();
  cmd1->add_option("--outdir", task1.outdir, "Where to save score and confusion matrix");
  cmd1->callback([&] { run = [&] { return cmd_eval_task1(task1); }; });

  auto* cmd2 = app.add_subcommand("eval-task2", "Score categorical answer predictions");
  cmd2->add_option("--predictions", task2.predictions, "Prediction CSV (AnswerValue)")
      ->required();
  cmd2->add_option("--truth", task2.truth, "Held-out truth CSV")->required();
  cmd2->add_option("--outdir", task2.outdir, "Where to save score and confusion matrix");
  cmd2->callback([&] { run = [&] { return cmd_eval_task2(task2); }; });

  auto* cmd3 = app.add_subcommand("eval-task3",
                                  "Score a quality ranking against expert pairwise judgments");
  cmd3->add_option("--ranking", task3.ranking, "Ranking CSV (QuestionId, ranking)")->required();
  cmd3->add_option("--judgments", task3.judgments, "Expert judgments CSV")->required();
  cmd3->callback([&] { run = [&] { return cmd_eval_task3(task3); }; });
}

void add_rank(CLI::App& app, RankOptions& options, Runner& run) {
  auto* cmd = app.add_subcommand("rank", "Compute a question-quality ranking");
  cmd->add_option("--input", options.input, "Answer-record CSV")->required();
  cmd->add_option("--answers", options.answers, "Answer metadata CSV (confidence, groups)");
  cmd->add_option("--method", options.method, "entropy, confidence, weighted or average-rank")
      ->check(CLI::IsMember({"entropy", "confidence", "weighted", "average-rank"}))
      ->capture_default_str();
  cmd->add_option("--weights", options.weights, "Weights for the weighted method")
      ->capture_default_str();
  cmd->add_option("--out", options.output, "Ranking CSV")->required();
  cmd->callback([&] { run = [&] { return cmd_rank(options); }; });
}

void add_submit(CLI::App& app, SubmitOptions& options, Runner& run) {
  auto* cmd = app.add_subcommand("submit", "Fill a submission template");
  cmd->add_option("--task", options.task, "1, 2 or 3")->required()->check(CLI::IsMember({1, 2, 3}));
  cmd->add_option("--model", options.model, "Model checkpoint (tasks 1 and 2)");
  cmd->add_option("--ranking", options.ranking, "Ranking CSV (task 3)");
  cmd->add_option("--template", options.template_csv, "Submission template CSV")->required();
  cmd->add_option("--outdir", options.outdir, "Output directory")->capture_default_str();
  cmd->callback([&] { run = [&] { return cmd_submit(options); }; });
}

void add_episode(CLI::App& app, EpisodeOptions& options, Runner& run) {
  auto* cmd = app.add_subcommand("episode", "Run the 10-step sequential selection protocol");
  cmd->add_option("--model", options.model,
                  "Model artifact (file or directory; model_task_4_ prefix)")
      ->required();
  cmd->add_option("--input", options.input, "Answer-record CSV defining truth and masks")
      ->required();
  cmd->add_option("--policy", options.policy, "random, max_uncertainty or fisher_information")
      ->capture_default_str();
  cmd->add_option("--budget", options.budget, "Question budget per student")
      ->capture_default_str();
  cmd->add_option("--seed", options.seed)->capture_default_str();
  cmd->add_option("--target-fraction", options.target_fraction,
                  "Fraction of each student's answers held out as targets")
      ->capture_default_str();
  cmd->add_flag("--per-step-accuracy", options.per_step_accuracy,
                "Record running accuracy in the trace");
  cmd->add_option("--outdir", options.outdir, "Where to write the JSON-lines trace")
      ->capture_default_str();
  cmd->callback([&] { run = [&] { return cmd_episode(options); }; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diagq: diagnostic-question analytics and adaptive assessment"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file (flags win)");

  Runner run;
  SplitOptions split_options;
  PrepOptions prep_options;
  SimulateOptions simulate_options;
  TrainOptions train_options;
  EvalTaskOptions eval1_options, eval2_options;
  EvalTask3Options eval3_options;
  RankOptions rank_options;
  SubmitOptions submit_options;
  EpisodeOptions episode_options;

  add_split(app, split_options, run);
  add_prep(app, prep_options, run);
  add_simulate(app, simulate_options, run);
  add_train(app, train_options, run);
  add_eval(app, eval1_options, eval2_options, eval3_options, run);
  add_rank(app, rank_options, run);
  add_submit(app, submit_options, run);
  add_episode(app, episode_options, run);

  try {
    app.parse(argc, argv);
    if (log_level() >= LogLevel::info) {
      // Fully resolved configuration (defaults included) for reproducibility.
      for (const CLI::App* sub : app.get_subcommands()) {
        std::istringstream config(const_cast<CLI::App*>(sub)->config_to_str(true, false));
        std::string line;
        while (std::getline(config, line)) {
          if (!line.empty()) log_info("config: " + sub->get_name() + "." + line);
        }
      }
    }
    return run ? run() : 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
