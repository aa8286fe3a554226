#include "diagq/irt.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "optimize.hpp"

namespace diagq::models {

double sigmoid(double z) noexcept {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

constexpr double kProbEps = 1e-12;

double clamp_prob(double p) noexcept {
  if (p < kProbEps) return kProbEps;
  if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
  return p;
}

// -log p(y | z) for p = sigmoid(z), computed without overflow.
double bernoulli_nll(double z, int y) noexcept {
  double soft = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return soft - static_cast<double>(y) * z;
}

struct Layout {
  std::size_t n_students;
  std::size_t n_questions;
  bool two_pl;
  std::size_t size() const { return n_students + n_questions * (two_pl ? 2 : 1); }
  std::size_t theta(std::size_t s) const { return s; }
  std::size_t b(std::size_t q) const { return n_students + q; }
  std::size_t raw_a(std::size_t q) const { return n_students + n_questions + q; }
};

Layout layout_for(const data::ResponseMatrix& matrix, IrtKind kind) {
  return Layout{matrix.n_students(), matrix.n_questions(), kind == IrtKind::two_pl};
}

// Single pass over observed cells computing the objective and, when
// requested, the gradient plus a Gauss-Newton diagonal curvature estimate.
double evaluate(const data::ResponseMatrix& matrix, std::span<const double> params, IrtKind kind,
                double l2, std::span<double> grad, std::span<double> curv) {
  const Layout lay = layout_for(matrix, kind);
  const bool want_grad = !grad.empty();
  const double n_obs = static_cast<double>(matrix.n_observed());
  const double inv_n = 1.0 / n_obs;

  double nll = 0;
  if (want_grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(curv.begin(), curv.end(), 0.0);
  }
  for (std::size_t s = 0; s < matrix.n_students(); ++s) {
    const double theta = params[lay.theta(s)];
    for (const auto& cell : matrix.row(s)) {
      const std::size_t q = static_cast<std::size_t>(cell.question);
      const double b = params[lay.b(q)];
      const double a = lay.two_pl ? std::exp(params[lay.raw_a(q)]) : 1.0;
      const double z = a * (theta - b);
      const int y = cell.is_correct;
      nll += bernoulli_nll(z, y);
      if (!want_grad) continue;
      const double p = sigmoid(z);
      const double resid = p - static_cast<double>(y);
      const double w = p * (1.0 - p);
      grad[lay.theta(s)] += a * resid * inv_n;
      grad[lay.b(q)] -= a * resid * inv_n;
      curv[lay.theta(s)] += a * a * w * inv_n;
      curv[lay.b(q)] += a * a * w * inv_n;
      if (lay.two_pl) {
        grad[lay.raw_a(q)] += z * resid * inv_n;
        curv[lay.raw_a(q)] += z * z * w * inv_n;
      }
    }
  }

  double penalty = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    penalty += params[i] * params[i];
    if (want_grad) {
      grad[i] += l2 * params[i] * inv_n;
      curv[i] += l2 * inv_n;
    }
  }
  return (nll + 0.5 * l2 * penalty) * inv_n;
}

}  // namespace

std::size_t irt_parameter_count(const data::ResponseMatrix& matrix, IrtKind kind) {
  return layout_for(matrix, kind).size();
}

double irt_objective(const data::ResponseMatrix& matrix, std::span<const double> params,
                     IrtKind kind, double l2) {
  return evaluate(matrix, params, kind, l2, {}, {});
}

std::vector<double> irt_gradient(const data::ResponseMatrix& matrix, std::span<const double> params,
                                 IrtKind kind, double l2) {
  std::vector<double> grad(params.size()), curv(params.size());
  evaluate(matrix, params, kind, l2, grad, curv);
  return grad;
}

IrtModel IrtModel::fit(const data::ResponseMatrix& matrix, const IrtConfig& config) {
  if (matrix.n_observed() == 0) throw std::invalid_argument("irt fit: empty matrix");
  const Layout lay = layout_for(matrix, config.kind);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  std::vector<double> params(lay.size());
  for (double& v : params) v = init(rng);

  auto objective = [&](std::span<const double> p) {
    return evaluate(matrix, p, config.kind, config.l2, {}, {});
  };
  auto grad_and_curv = [&](std::span<const double> p, std::span<double> g, std::span<double> c) {
    evaluate(matrix, p, config.kind, config.l2, g, c);
  };
  auto trace = detail::minimize_monotone(params, objective, grad_and_curv, config.epochs,
                                         config.learning_rate, "irt_fit");

  IrtModel model;
  model.kind_ = config.kind;
  model.student_ids_ = matrix.student_ids();
  model.question_ids_ = matrix.question_ids();
  for (std::size_t i = 0; i < model.student_ids_.size(); ++i) {
    model.student_index_[model.student_ids_[i]] = i;
  }
  for (std::size_t j = 0; j < model.question_ids_.size(); ++j) {
    model.question_index_[model.question_ids_[j]] = j;
  }
  model.theta_.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(lay.n_students));
  model.b_.resize(lay.n_questions);
  model.a_.resize(lay.n_questions);
  for (std::size_t q = 0; q < lay.n_questions; ++q) {
    model.b_[q] = params[lay.b(q)];
    model.a_[q] = lay.two_pl ? std::exp(params[lay.raw_a(q)]) : 1.0;
  }
  model.loss_curve_ = std::move(trace.loss);
  return model;
}

IrtModel IrtModel::from_parameters(IrtKind kind, std::vector<Id> student_ids,
                                   std::vector<double> theta, std::vector<Id> question_ids,
                                   std::vector<double> difficulty,
                                   std::vector<double> discrimination) {
  if (student_ids.size() != theta.size() || question_ids.size() != difficulty.size() ||
      question_ids.size() != discrimination.size()) {
    throw std::invalid_argument("irt parameters: size mismatch");
  }
  for (double a : discrimination) {
    if (!(a > 0) || !std::isfinite(a)) {
      throw std::invalid_argument("irt parameters: discrimination must be positive and finite");
    }
  }
  IrtModel model;
  model.kind_ = kind;
  model.student_ids_ = std::move(student_ids);
  model.question_ids_ = std::move(question_ids);
  model.theta_ = std::move(theta);
  model.b_ = std::move(difficulty);
  model.a_ = std::move(discrimination);
  for (std::size_t i = 0; i < model.student_ids_.size(); ++i) {
    model.student_index_[model.student_ids_[i]] = i;
  }
  for (std::size_t j = 0; j < model.question_ids_.size(); ++j) {
    model.question_index_[model.question_ids_[j]] = j;
  }
  return model;
}

std::size_t IrtModel::student_index(Id user_id) const {
  auto it = student_index_.find(user_id);
  if (it == student_index_.end()) {
    throw std::out_of_range("unknown user id " + std::to_string(user_id));
  }
  return it->second;
}

std::size_t IrtModel::question_index(Id question_id) const {
  auto it = question_index_.find(question_id);
  if (it == question_index_.end()) {
    throw std::out_of_range("unknown question id " + std::to_string(question_id));
  }
  return it->second;
}

double IrtModel::predict(Id user_id, Id question_id) const {
  std::size_t s = student_index(user_id);
  std::size_t q = question_index(question_id);
  return clamp_prob(sigmoid(a_[q] * (theta_[s] - b_[q])));
}

double IrtModel::ability(Id user_id) const { return theta_[student_index(user_id)]; }
double IrtModel::difficulty(Id question_id) const { return b_[question_index(question_id)]; }
double IrtModel::discrimination(Id question_id) const { return a_[question_index(question_id)]; }

}  // namespace diagq::models
