#pragma once

#include <optional>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "diagq/dataset.hpp"
#include "diagq/irt.hpp"
#include "diagq/predictor.hpp"

namespace diagq::adaptive {

using data::Id;

struct Observation {
  Id question_id = 0;
  int answer_value = 0;
  int is_correct = 0;
};

/// Per-episode bookkeeping for the sequential selection protocol. Candidate
/// and target masks are disjoint per student; targets are never queryable.
/// State mutates only through reveal().
class SelectionState {
 public:
  struct StudentState {
    Id student_id = 0;
    std::vector<Observation> observed;  // in reveal order
    std::vector<Id> candidates;         // sorted, shrinks as questions are revealed
    std::vector<Id> targets;            // sorted, fixed
  };

  static SelectionState init(std::span<const Id> students,
                             const std::unordered_map<Id, std::vector<Id>>& candidate_masks,
                             const std::unordered_map<Id, std::vector<Id>>& target_masks,
                             int budget = 10);

  int step() const { return step_; }
  int budget() const { return budget_; }
  const std::vector<StudentState>& students() const { return students_; }

 private:
  friend void reveal(SelectionState&, const class Environment&,
                     std::span<const std::pair<Id, Id>>);

  std::vector<StudentState> students_;
  int step_ = 0;
  int budget_ = 10;
};

/// Model surface the episode loop drives: predict, optionally expose item
/// discrimination (for information-based selection), and fold in newly
/// revealed answers.
class AdaptiveModel {
 public:
  virtual ~AdaptiveModel() = default;
  virtual double predict_prob(Id student_id, Id question_id) const = 0;
  virtual std::optional<double> discrimination(Id question_id) const { return std::nullopt; }
  virtual void update(Id student_id, std::span<const Observation> newly_revealed) = 0;
};

/// IRT-backed adaptive model. Item parameters stay frozen for the whole
/// episode; each update re-estimates the student's ability by Newton steps on
/// the ability log-likelihood (standard normal prior, run to convergence).
/// Students unknown to the fitted model start at theta = 0.
class IrtAdaptiveModel final : public AdaptiveModel {
 public:
  explicit IrtAdaptiveModel(models::IrtModel items);

  double predict_prob(Id student_id, Id question_id) const override;
  std::optional<double> discrimination(Id question_id) const override;
  void update(Id student_id, std::span<const Observation> newly_revealed) override;

  double ability(Id student_id) const;
  const models::IrtModel& items() const { return items_; }

 private:
  models::IrtModel items_;
  std::unordered_map<Id, double> fitted_theta_;  // from the loaded model
  std::unordered_map<Id, double> theta_;         // episode estimates
  std::unordered_map<Id, std::vector<Observation>> history_;
};

/// Baseline wrapper: predictions from a fixed model, updates are no-ops.
class StaticAdaptiveModel final : public AdaptiveModel {
 public:
  explicit StaticAdaptiveModel(const models::Predictor& model) : model_(&model) {}

  double predict_prob(Id student_id, Id question_id) const override {
    return model_->prob_correct(student_id, question_id);
  }
  void update(Id, std::span<const Observation>) override {}

 private:
  const models::Predictor* model_;
};

enum class PolicyKind { random, max_uncertainty, fisher_information };

/// Stateful so the random policy draws a deterministic stream across steps.
class SelectionPolicy {
 public:
  SelectionPolicy(PolicyKind kind, std::uint64_t seed) : kind_(kind), rng_(seed) {}
  PolicyKind kind() const { return kind_; }

  /// Picks from the student's remaining candidates (must be non-empty).
  /// max_uncertainty maximizes p(1-p); fisher_information maximizes
  /// a^2 p (1-p) and requires a model exposing discrimination. Ties go to the
  /// smallest question id.
  Id choose(const SelectionState::StudentState& student, const AdaptiveModel& model);

 private:
  PolicyKind kind_;
  std::mt19937_64 rng_;
};

/// One selection per student with a non-empty candidate set; students with
/// exhausted candidates abstain. Throws once the budget is spent.
std::vector<std::pair<Id, Id>> select_questions(const SelectionState& state,
                                                const AdaptiveModel& model,
                                                SelectionPolicy& policy);

/// Source of ground-truth answers. Only reveal() and the episode scorer may
/// touch it, which is what keeps target answers out of model updates.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::optional<Observation> answer(Id student_id, Id question_id) const = 0;
};

/// Truth table backed by a response matrix (real split or synthetic sample).
class MatrixEnvironment final : public Environment {
 public:
  explicit MatrixEnvironment(const data::ResponseMatrix& matrix) : matrix_(&matrix) {}
  std::optional<Observation> answer(Id student_id, Id question_id) const override;

 private:
  const data::ResponseMatrix* matrix_;
};

/// Applies one batched step: validates every selection against the student's
/// candidate set, appends the revealed observations, removes the questions
/// from the candidate sets and advances the step counter.
void reveal(SelectionState& state, const Environment& environment,
            std::span<const std::pair<Id, Id>> selections);

/// Hard 0/1 labels (threshold 0.5) for every (student, target) pair, targets
/// in ascending question order.
std::unordered_map<Id, std::vector<int>> predict_targets(const AdaptiveModel& model,
                                                         const SelectionState& state);

struct StepTrace {
  int step = 0;
  std::vector<std::pair<Id, Id>> selections;
  std::optional<double> accuracy;  // filled when per-step accuracy is requested
};

struct EpisodeResult {
  std::unordered_map<Id, std::vector<Id>> selected;  // per student, selection order
  double final_accuracy = 0;
  std::vector<StepTrace> trace;
};

/// Runs select -> reveal -> update for the full budget, then scores the final
/// predictions on the target masks against the environment.
EpisodeResult run_episode(AdaptiveModel& model, const Environment& environment,
                          SelectionState state, SelectionPolicy policy,
                          bool per_step_accuracy = false);

struct MaskSet {
  std::unordered_map<Id, std::vector<Id>> candidates;
  std::unordered_map<Id, std::vector<Id>> targets;
};

/// Real-data mask derivation: a seeded fraction of each student's answered
/// questions becomes the target set, the rest stay candidates (an answer must
/// exist to be revealed).
MaskSet derive_masks(const data::ResponseMatrix& matrix, double target_fraction,
                     std::uint64_t seed);

}  // namespace diagq::adaptive
