#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "diagq/predictor.hpp"

namespace diagq::models {

/// Fraction of positions where predicted == truth. Same definition for binary
/// and categorical labels. Throws on empty or mismatched inputs.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// counts[i][j] = number of pairs with truth label i and predicted label j
/// (labels shifted down by label_base). Throws on out-of-range labels.
using ConfusionCounts = std::vector<std::vector<std::int64_t>>;
ConfusionCounts confusion_matrix(std::span<const int> predicted, std::span<const int> truth,
                                 int n_classes, int label_base = 0);

/// Arithmetic mean of member probabilities. All members must support binary
/// prediction; throws otherwise.
double ensemble_prob(std::span<const Predictor* const> members, Id user_id, Id question_id);

/// Mean of member distributions, renormalized.
std::array<double, 4> ensemble_distribution(std::span<const Predictor* const> members, Id user_id,
                                            Id question_id);

}  // namespace diagq::models
