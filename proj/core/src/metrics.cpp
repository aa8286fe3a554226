#include "diagq/metrics.hpp"

#include <stdexcept>

namespace diagq::models {

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("accuracy: prediction/truth length mismatch");
  }
  if (predicted.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t matches = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == truth[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(predicted.size());
}

ConfusionCounts confusion_matrix(std::span<const int> predicted, std::span<const int> truth,
                                 int n_classes, int label_base) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("confusion_matrix: prediction/truth length mismatch");
  }
  if (n_classes <= 0) throw std::invalid_argument("confusion_matrix: n_classes must be positive");
  ConfusionCounts counts(static_cast<std::size_t>(n_classes),
                         std::vector<std::int64_t>(static_cast<std::size_t>(n_classes), 0));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    int t = truth[i] - label_base;
    int p = predicted[i] - label_base;
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes) {
      throw std::out_of_range("confusion_matrix: label out of range at position " +
                              std::to_string(i));
    }
    ++counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return counts;
}

double ensemble_prob(std::span<const Predictor* const> members, Id user_id, Id question_id) {
  if (members.empty()) throw std::invalid_argument("ensemble: no members");
  double sum = 0;
  for (const Predictor* m : members) {
    if (m == nullptr || !m->supports(PredictionMode::binary)) {
      throw std::invalid_argument("ensemble: member does not support binary prediction");
    }
    sum += m->prob_correct(user_id, question_id);
  }
  return sum / static_cast<double>(members.size());
}

std::array<double, 4> ensemble_distribution(std::span<const Predictor* const> members, Id user_id,
                                            Id question_id) {
  if (members.empty()) throw std::invalid_argument("ensemble: no members");
  std::array<double, 4> mean{};
  for (const Predictor* m : members) {
    if (m == nullptr || !m->supports(PredictionMode::categorical)) {
      throw std::invalid_argument("ensemble: member does not support categorical prediction");
    }
    auto dist = m->choice_distribution(user_id, question_id);
    for (std::size_t c = 0; c < 4; ++c) mean[c] += dist[c];
  }
  double total = 0;
  for (double& v : mean) {
    v /= static_cast<double>(members.size());
    total += v;
  }
  // Members output distributions already, so this is a no-op up to rounding.
  for (double& v : mean) v /= total;
  return mean;
}

}  // namespace diagq::models
