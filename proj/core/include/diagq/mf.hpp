#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "diagq/dataset.hpp"
#include "diagq/predictor.hpp"

namespace diagq::models {

struct MfConfig {
  int k = 8;
  int epochs = 400;
  double learning_rate = 1.0;
  // The objective normalizes by the observation count, so useful penalty
  // strengths sit well above the usual per-cell values.
  double l2 = 20.0;
  PredictionMode mode = PredictionMode::binary;
  std::uint64_t seed = 0;
};

/// Biased matrix factorization over observed cells.
///
/// Binary head:      p(correct) = sigmoid(b0 + bs_s + bq_q + u_s . v_q)
/// Categorical head: p(choice c) = softmax_c(bqc_{q,c} + u_s . v_{q,c})
///
/// Binary mode minimizes logistic loss, categorical mode 4-way cross-entropy,
/// both with L2 penalty. Factors start from a seeded Gaussian (stdev 0.01).
class MfModel final : public Predictor {
 public:
  MfModel() = default;

  static MfModel fit(const data::ResponseMatrix& matrix, const MfConfig& config);

  bool supports(PredictionMode mode) const noexcept override { return mode == mode_; }
  double prob_correct(Id user_id, Id question_id) const override;
  std::array<double, 4> choice_distribution(Id user_id, Id question_id) const override;

  PredictionMode mode() const { return mode_; }
  int k() const { return k_; }
  const std::vector<double>& loss_curve() const { return loss_curve_; }
  /// Non-fatal fit diagnostics (for example k larger than the matrix rank).
  const std::vector<std::string>& warnings() const { return warnings_; }

  const std::vector<Id>& student_ids() const { return student_ids_; }
  const std::vector<Id>& question_ids() const { return question_ids_; }
  double global_bias() const { return global_bias_; }
  const std::vector<double>& student_bias() const { return student_bias_; }
  const std::vector<double>& question_bias() const { return question_bias_; }
  const std::vector<double>& student_factors() const { return student_factors_; }
  const std::vector<double>& question_factors() const { return question_factors_; }

  /// Rebuilds a model from raw parameter blocks (deserialization, tests).
  /// question_bias/question_factors have per-question size 1/k in binary mode
  /// and 4/4k in categorical mode.
  static MfModel from_parameters(PredictionMode mode, int k, std::vector<Id> student_ids,
                                 std::vector<Id> question_ids, double global_bias,
                                 std::vector<double> student_bias,
                                 std::vector<double> question_bias,
                                 std::vector<double> student_factors,
                                 std::vector<double> question_factors);

 private:
  std::size_t student_index(Id user_id) const;
  std::size_t question_index(Id question_id) const;

  PredictionMode mode_ = PredictionMode::binary;
  int k_ = 0;
  std::vector<Id> student_ids_;
  std::vector<Id> question_ids_;
  std::unordered_map<Id, std::size_t> student_index_;
  std::unordered_map<Id, std::size_t> question_index_;
  double global_bias_ = 0;
  std::vector<double> student_bias_;     // n (binary mode only, empty otherwise)
  std::vector<double> question_bias_;    // m or m*4
  std::vector<double> student_factors_;  // n*k
  std::vector<double> question_factors_; // m*k or m*4*k
  std::vector<double> loss_curve_;
  std::vector<std::string> warnings_;
};

}  // namespace diagq::models
