#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "diagq/dataset.hpp"
#include "diagq/predictor.hpp"

namespace diagq::models {

enum class IrtKind { one_pl, two_pl };

struct IrtConfig {
  IrtKind kind = IrtKind::two_pl;
  int epochs = 200;
  double learning_rate = 1.0;  // initial preconditioned step size
  double l2 = 1.0;
  std::uint64_t seed = 0;
};

/// Logistic item response model: p(correct) = sigmoid(a_q * (theta_s - b_q)).
/// 1PL fixes a = 1; 2PL learns a through a = exp(raw_a) so discrimination
/// stays positive. Fitting maximizes the L2-penalized Bernoulli likelihood.
class IrtModel final : public Predictor {
 public:
  IrtModel() = default;

  static IrtModel fit(const data::ResponseMatrix& matrix, const IrtConfig& config);

  static IrtModel from_parameters(IrtKind kind, std::vector<Id> student_ids,
                                  std::vector<double> theta, std::vector<Id> question_ids,
                                  std::vector<double> difficulty,
                                  std::vector<double> discrimination);

  double predict(Id user_id, Id question_id) const;

  bool supports(PredictionMode mode) const noexcept override {
    return mode == PredictionMode::binary;
  }
  double prob_correct(Id user_id, Id question_id) const override {
    return predict(user_id, question_id);
  }

  double ability(Id user_id) const;
  double difficulty(Id question_id) const;
  double discrimination(Id question_id) const;

  IrtKind kind() const { return kind_; }
  const std::vector<Id>& student_ids() const { return student_ids_; }
  const std::vector<Id>& question_ids() const { return question_ids_; }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& b() const { return b_; }
  const std::vector<double>& a() const { return a_; }

  /// Objective value after each fitting epoch (non-increasing).
  const std::vector<double>& loss_curve() const { return loss_curve_; }

 private:
  std::size_t student_index(Id user_id) const;
  std::size_t question_index(Id question_id) const;

  IrtKind kind_ = IrtKind::two_pl;
  std::vector<Id> student_ids_;
  std::vector<Id> question_ids_;
  std::unordered_map<Id, std::size_t> student_index_;
  std::unordered_map<Id, std::size_t> question_index_;
  std::vector<double> theta_;
  std::vector<double> b_;
  std::vector<double> a_;
  std::vector<double> loss_curve_;
};

/// Numerically stable logistic function.
double sigmoid(double z) noexcept;

// Flat parameter layout used by the fitting objective: [theta | b | raw_a],
// with the raw_a block present only for the 2PL model. Exposed so the
// analytic gradient can be verified against finite differences.
std::size_t irt_parameter_count(const data::ResponseMatrix& matrix, IrtKind kind);
double irt_objective(const data::ResponseMatrix& matrix, std::span<const double> params,
                     IrtKind kind, double l2);
std::vector<double> irt_gradient(const data::ResponseMatrix& matrix, std::span<const double> params,
                                 IrtKind kind, double l2);

}  // namespace diagq::models
