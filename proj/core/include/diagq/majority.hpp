#pragma once

#include <unordered_map>

#include "diagq/dataset.hpp"
#include "diagq/predictor.hpp"

namespace diagq::models {

/// Per-question majority baseline. Hard labels come from the modal value
/// (ties to the smaller label / option index); probabilities and choice
/// distributions are the empirical per-question frequencies. Questions never
/// seen in training fall back to the global statistics.
class MajorityModel final : public Predictor {
 public:
  struct QuestionStats {
    std::int64_t n = 0;
    std::int64_t n_correct = 0;
    std::array<std::int64_t, 4> choice_counts{};
  };

  MajorityModel() = default;
  static MajorityModel fit(const data::ResponseMatrix& matrix);

  /// Modal correctness label for the question (0 or 1).
  int predict_binary(Id question_id) const;
  /// Modal answer option for the question (1..4).
  int predict_choice(Id question_id) const;

  bool supports(PredictionMode) const noexcept override { return true; }
  double prob_correct(Id user_id, Id question_id) const override;
  std::array<double, 4> choice_distribution(Id user_id, Id question_id) const override;

  const std::unordered_map<Id, QuestionStats>& question_stats() const { return stats_; }
  const QuestionStats& global_stats() const { return global_; }

  static MajorityModel from_stats(std::unordered_map<Id, QuestionStats> stats,
                                  QuestionStats global);

 private:
  const QuestionStats& stats_for(Id question_id) const;

  std::unordered_map<Id, QuestionStats> stats_;
  QuestionStats global_;
};

}  // namespace diagq::models
