#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "diagq/records.hpp"

namespace diagq::models {

using data::Id;

enum class PredictionMode { binary, categorical };

/// Common prediction surface. A model advertises which modes it supports;
/// unsupported calls throw. Fitted models are immutable and safe for
/// concurrent prediction.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual bool supports(PredictionMode mode) const noexcept = 0;

  /// Probability that the student answers the question correctly, in (0,1).
  virtual double prob_correct(Id user_id, Id question_id) const;

  /// Distribution over the four answer options (index 0 = option 1).
  virtual std::array<double, 4> choice_distribution(Id user_id, Id question_id) const;
};

/// Argmax over the four options with ties to the smallest option index.
/// Returns an option in 1..4.
int argmax_choice(const std::array<double, 4>& dist) noexcept;

/// Predictions for an explicit list of (user, question) pairs. Binary labels
/// are thresholded at 0.5; categorical labels are the argmax option.
struct PredictionSet {
  PredictionMode mode = PredictionMode::binary;
  std::vector<std::pair<Id, Id>> pairs;
  std::vector<double> probabilities;                  // binary mode
  std::vector<std::array<double, 4>> distributions;   // categorical mode
  std::vector<int> labels;                            // 0/1 or 1..4
};

PredictionSet predict_pairs(const Predictor& model, std::span<const std::pair<Id, Id>> pairs,
                            PredictionMode mode);

}  // namespace diagq::models
