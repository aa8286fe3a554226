#include "diagq/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "diagq/metrics.hpp"
#include "diagq/rng.hpp"

namespace diagq::adaptive {

namespace {

std::vector<Id> sorted_unique(std::vector<Id> ids, const char* what) {
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument(std::string(what) + " mask contains duplicates");
  }
  return ids;
}

}  // namespace

SelectionState SelectionState::init(std::span<const Id> students,
                                    const std::unordered_map<Id, std::vector<Id>>& candidate_masks,
                                    const std::unordered_map<Id, std::vector<Id>>& target_masks,
                                    int budget) {
  if (students.empty()) throw std::invalid_argument("init_episode: empty student list");
  // Budget 0 is the degenerate evaluate-the-prior episode.
  if (budget < 0) throw std::invalid_argument("init_episode: budget must be >= 0");

  SelectionState state;
  state.budget_ = budget;
  state.students_.reserve(students.size());
  std::set<Id> seen;
  for (Id student : students) {
    if (!seen.insert(student).second) {
      throw std::invalid_argument("init_episode: duplicate student " + std::to_string(student));
    }
    StudentState s;
    s.student_id = student;
    if (auto it = candidate_masks.find(student); it != candidate_masks.end()) {
      s.candidates = sorted_unique(it->second, "candidate");
    }
    if (auto it = target_masks.find(student); it != target_masks.end()) {
      s.targets = sorted_unique(it->second, "target");
    }
    std::vector<Id> overlap;
    std::set_intersection(s.candidates.begin(), s.candidates.end(), s.targets.begin(),
                          s.targets.end(), std::back_inserter(overlap));
    if (!overlap.empty()) {
      throw std::invalid_argument("init_episode: candidate and target masks overlap for student " +
                                  std::to_string(student));
    }
    state.students_.push_back(std::move(s));
  }
  return state;
}

Id SelectionPolicy::choose(const SelectionState::StudentState& student,
                           const AdaptiveModel& model) {
  const auto& candidates = student.candidates;
  if (candidates.empty()) throw std::logic_error("choose called with no candidates");
  switch (kind_) {
    case PolicyKind::random:
      return candidates[static_cast<std::size_t>(rng_() % candidates.size())];
    case PolicyKind::max_uncertainty: {
      Id best = candidates.front();
      double best_gap = std::numeric_limits<double>::infinity();
      for (Id q : candidates) {  // ascending ids, so strict < keeps the smallest on ties
        double gap = std::abs(model.predict_prob(student.student_id, q) - 0.5);
        if (gap < best_gap) {
          best_gap = gap;
          best = q;
        }
      }
      return best;
    }
    case PolicyKind::fisher_information: {
      Id best = candidates.front();
      double best_info = -1;
      for (Id q : candidates) {
        auto a = model.discrimination(q);
        if (!a) {
          throw std::invalid_argument(
              "fisher_information policy requires a model exposing item discrimination");
        }
        double p = model.predict_prob(student.student_id, q);
        double info = (*a) * (*a) * p * (1.0 - p);
        if (info > best_info) {
          best_info = info;
          best = q;
        }
      }
      return best;
    }
  }
  throw std::logic_error("unknown policy kind");
}

std::vector<std::pair<Id, Id>> select_questions(const SelectionState& state,
                                                const AdaptiveModel& model,
                                                SelectionPolicy& policy) {
  if (state.step() >= state.budget()) {
    throw std::logic_error("select_questions called after the " + std::to_string(state.budget()) +
                           "-step budget was exhausted");
  }
  std::vector<std::pair<Id, Id>> selections;
  selections.reserve(state.students().size());
  for (const auto& student : state.students()) {
    if (student.candidates.empty()) continue;  // abstain
    selections.emplace_back(student.student_id, policy.choose(student, model));
  }
  return selections;
}

std::optional<Observation> MatrixEnvironment::answer(Id student_id, Id question_id) const {
  auto s = matrix_->student_index(student_id);
  auto q = matrix_->question_index(question_id);
  if (!s || !q) return std::nullopt;
  const auto* cell = matrix_->find(*s, *q);
  if (cell == nullptr) return std::nullopt;
  return Observation{question_id, cell->answer_value, cell->is_correct};
}

void reveal(SelectionState& state, const Environment& environment,
            std::span<const std::pair<Id, Id>> selections) {
  if (state.step_ >= state.budget_) {
    throw std::logic_error("reveal called after the budget was exhausted");
  }
  std::unordered_map<Id, SelectionState::StudentState*> by_id;
  for (auto& s : state.students_) by_id[s.student_id] = &s;

  std::set<Id> touched;
  for (const auto& [student_id, question_id] : selections) {
    auto it = by_id.find(student_id);
    if (it == by_id.end()) {
      throw std::invalid_argument("selection for unknown student " + std::to_string(student_id));
    }
    if (!touched.insert(student_id).second) {
      throw std::invalid_argument("duplicate selection for student " + std::to_string(student_id));
    }
    auto& student = *it->second;
    auto pos = std::lower_bound(student.candidates.begin(), student.candidates.end(), question_id);
    if (pos == student.candidates.end() || *pos != question_id) {
      throw std::invalid_argument("question " + std::to_string(question_id) +
                                  " is not a remaining candidate for student " +
                                  std::to_string(student_id));
    }
    auto obs = environment.answer(student_id, question_id);
    if (!obs) {
      throw std::runtime_error("environment has no answer for student " +
                               std::to_string(student_id) + ", question " +
                               std::to_string(question_id));
    }
    student.candidates.erase(pos);
    student.observed.push_back(*obs);
  }
  ++state.step_;
}

IrtAdaptiveModel::IrtAdaptiveModel(models::IrtModel items) : items_(std::move(items)) {
  // Students the fitted model already knows start from their fitted ability;
  // everyone else cold-starts at the prior mean and only moves on update().
  for (std::size_t i = 0; i < items_.student_ids().size(); ++i) {
    fitted_theta_[items_.student_ids()[i]] = items_.theta()[i];
  }
}

double IrtAdaptiveModel::ability(Id student_id) const {
  if (auto it = theta_.find(student_id); it != theta_.end()) return it->second;
  if (auto it = fitted_theta_.find(student_id); it != fitted_theta_.end()) return it->second;
  return 0.0;
}

double IrtAdaptiveModel::predict_prob(Id student_id, Id question_id) const {
  double a = items_.discrimination(question_id);
  double b = items_.difficulty(question_id);
  double p = models::sigmoid(a * (ability(student_id) - b));
  if (p < 1e-12) p = 1e-12;
  if (p > 1.0 - 1e-12) p = 1.0 - 1e-12;
  return p;
}

std::optional<double> IrtAdaptiveModel::discrimination(Id question_id) const {
  return items_.discrimination(question_id);
}

void IrtAdaptiveModel::update(Id student_id, std::span<const Observation> newly_revealed) {
  if (newly_revealed.empty()) return;
  auto& history = history_[student_id];
  history.insert(history.end(), newly_revealed.begin(), newly_revealed.end());

  // Newton on the ability log-likelihood with a standard normal prior and
  // item parameters frozen. Concave in theta, so this converges to the
  // unique optimum regardless of how the history was batched.
  double theta = theta_.count(student_id) ? theta_[student_id] : 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    double grad = -theta;
    double hess = -1.0;
    for (const auto& obs : history) {
      double a = items_.discrimination(obs.question_id);
      double b = items_.difficulty(obs.question_id);
      double p = models::sigmoid(a * (theta - b));
      grad += a * (static_cast<double>(obs.is_correct) - p);
      hess -= a * a * p * (1.0 - p);
    }
    double delta = grad / hess;
    theta -= delta;
    if (std::abs(delta) < 1e-10) break;
  }
  theta_[student_id] = theta;
}

std::unordered_map<Id, std::vector<int>> predict_targets(const AdaptiveModel& model,
                                                         const SelectionState& state) {
  std::unordered_map<Id, std::vector<int>> labels;
  labels.reserve(state.students().size());
  for (const auto& student : state.students()) {
    auto& out = labels[student.student_id];
    out.reserve(student.targets.size());
    for (Id q : student.targets) {
      out.push_back(model.predict_prob(student.student_id, q) >= 0.5 ? 1 : 0);
    }
  }
  return labels;
}

namespace {

double score_targets(const AdaptiveModel& model, const Environment& environment,
                     const SelectionState& state) {
  auto labels = predict_targets(model, state);
  std::vector<int> predicted, truth;
  for (const auto& student : state.students()) {
    const auto& student_labels = labels.at(student.student_id);
    for (std::size_t i = 0; i < student.targets.size(); ++i) {
      auto obs = environment.answer(student.student_id, student.targets[i]);
      if (!obs) {
        throw std::runtime_error("environment has no truth for target question " +
                                 std::to_string(student.targets[i]) + " of student " +
                                 std::to_string(student.student_id));
      }
      predicted.push_back(student_labels[i]);
      truth.push_back(obs->is_correct);
    }
  }
  if (predicted.empty()) return std::numeric_limits<double>::quiet_NaN();
  return models::accuracy(predicted, truth);
}

}  // namespace

EpisodeResult run_episode(AdaptiveModel& model, const Environment& environment,
                          SelectionState state, SelectionPolicy policy, bool per_step_accuracy) {
  EpisodeResult result;
  std::unordered_map<Id, const SelectionState::StudentState*> by_id;
  for (const auto& student : state.students()) by_id[student.student_id] = &student;

  for (int step = 0; step < state.budget(); ++step) {
    auto selections = select_questions(state, model, policy);
    reveal(state, environment, selections);
    for (const auto& [student_id, question_id] : selections) {
      // The freshly revealed observation is the last one appended.
      const auto& observed = by_id.at(student_id)->observed;
      model.update(student_id, {&observed.back(), 1});
      (void)question_id;
    }
    StepTrace trace;
    trace.step = step + 1;
    trace.selections = selections;
    if (per_step_accuracy) trace.accuracy = score_targets(model, environment, state);
    result.trace.push_back(std::move(trace));
  }
  result.final_accuracy = score_targets(model, environment, state);
  for (const auto& student : state.students()) {
    auto& list = result.selected[student.student_id];
    list.reserve(student.observed.size());
    for (const auto& obs : student.observed) list.push_back(obs.question_id);
  }
  return result;
}

MaskSet derive_masks(const data::ResponseMatrix& matrix, double target_fraction,
                     std::uint64_t seed) {
  if (!(target_fraction > 0.0) || !(target_fraction < 1.0)) {
    throw std::invalid_argument("target fraction must lie in (0,1)");
  }
  MaskSet masks;
  for (std::size_t s = 0; s < matrix.n_students(); ++s) {
    std::vector<Id> answered;
    answered.reserve(matrix.row(s).size());
    for (const auto& cell : matrix.row(s)) {
      answered.push_back(matrix.question_id(static_cast<std::size_t>(cell.question)));
    }
    Id student = matrix.student_id(s);
    if (answered.size() < 2) {
      masks.candidates[student] = std::move(answered);
      masks.targets[student] = {};
      continue;
    }
    // Per-student stream so mask derivation is order-independent.
    seeded_shuffle(answered, seed ^ static_cast<std::uint64_t>(student) * 0x9e3779b97f4a7c15ull);
    std::size_t n_targets = static_cast<std::size_t>(
        std::floor(static_cast<double>(answered.size()) * target_fraction));
    n_targets = std::clamp<std::size_t>(n_targets, 1, answered.size() - 1);
    masks.targets[student] = {answered.begin(), answered.begin() + static_cast<std::ptrdiff_t>(n_targets)};
    masks.candidates[student] = {answered.begin() + static_cast<std::ptrdiff_t>(n_targets),
                                 answered.end()};
  }
  return masks;
}

}  // namespace diagq::adaptive
