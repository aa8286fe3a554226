#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace diagq::models::detail {

struct FitTrace {
  std::vector<double> loss;  // objective after each epoch, first entry = initial value
};

/// Full-batch descent with a per-coordinate curvature preconditioner and a
/// backtracking step acceptance rule: a step is taken only if it does not
/// increase the objective, so the recorded loss sequence is non-increasing.
/// grad_and_curvature fills the gradient and a positive diagonal curvature
/// estimate for the current parameters.
inline FitTrace minimize_monotone(
    std::vector<double>& params,
    const std::function<double(std::span<const double>)>& objective,
    const std::function<void(std::span<const double>, std::span<double>, std::span<double>)>&
        grad_and_curvature,
    int epochs, double initial_step, const std::string& what) {
  FitTrace trace;
  double current = objective(params);
  if (!std::isfinite(current)) {
    throw std::runtime_error(what + " diverged at epoch 0 (non-finite loss)");
  }
  trace.loss.push_back(current);

  std::vector<double> grad(params.size()), curv(params.size()), trial(params.size());
  double step = initial_step;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    grad_and_curvature(params, grad, curv);
    bool accepted = false;
    double local = step;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        double c = curv[i] > 1e-12 ? curv[i] : 1e-12;
        trial[i] = params[i] - local * grad[i] / c;
      }
      double value = objective(trial);
      if (std::isfinite(value) && value <= current + 1e-12) {
        params.swap(trial);
        current = value;
        step = std::min(local * 1.5, 64.0);
        accepted = true;
        break;
      }
      local *= 0.5;
    }
    if (!std::isfinite(current)) {
      throw std::runtime_error(what + " diverged at epoch " + std::to_string(epoch));
    }
    trace.loss.push_back(current);
    if (!accepted) break;  // no descent direction at this scale; converged
  }
  return trace;
}

}  // namespace diagq::models::detail
