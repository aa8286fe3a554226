#include "diagq/mf.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "diagq/irt.hpp"  // sigmoid
#include "optimize.hpp"

namespace diagq::models {

namespace {

constexpr double kProbEps = 1e-12;

double bernoulli_nll(double z, int y) noexcept {
  double soft = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return soft - static_cast<double>(y) * z;
}

// Flat parameter layout. Binary: [b0 | bs(n) | bq(m) | U(n*k) | V(m*k)].
// Categorical: [bqc(m*4) | U(n*k) | V(m*4*k)]. A per-student or global bias
// would shift all four logits equally, so the categorical head omits them.
struct Layout {
  std::size_t n, m, k;
  bool categorical;

  std::size_t size() const {
    if (categorical) return m * 4 + n * k + m * 4 * k;
    return 1 + n + m + n * k + m * k;
  }
  // binary blocks
  std::size_t b0() const { return 0; }
  std::size_t bs(std::size_t s) const { return 1 + s; }
  std::size_t bq(std::size_t q) const { return 1 + n + q; }
  std::size_t u_bin(std::size_t s) const { return 1 + n + m + s * k; }
  std::size_t v_bin(std::size_t q) const { return 1 + n + m + n * k + q * k; }
  // categorical blocks
  std::size_t bqc(std::size_t q, std::size_t c) const { return q * 4 + c; }
  std::size_t u_cat(std::size_t s) const { return m * 4 + s * k; }
  std::size_t v_cat(std::size_t q, std::size_t c) const { return m * 4 + n * k + (q * 4 + c) * k; }
};

double evaluate_binary(const data::ResponseMatrix& matrix, const Layout& lay,
                       std::span<const double> p, double l2, std::span<double> grad,
                       std::span<double> curv) {
  const bool want_grad = !grad.empty();
  const double inv_n = 1.0 / static_cast<double>(matrix.n_observed());
  if (want_grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(curv.begin(), curv.end(), 0.0);
  }
  double nll = 0;
  for (std::size_t s = 0; s < matrix.n_students(); ++s) {
    const double* u = &p[lay.u_bin(s)];
    for (const auto& cell : matrix.row(s)) {
      const std::size_t q = static_cast<std::size_t>(cell.question);
      const double* v = &p[lay.v_bin(q)];
      double z = p[lay.b0()] + p[lay.bs(s)] + p[lay.bq(q)];
      for (std::size_t f = 0; f < lay.k; ++f) z += u[f] * v[f];
      const int y = cell.is_correct;
      nll += bernoulli_nll(z, y);
      if (!want_grad) continue;
      const double prob = sigmoid(z);
      const double resid = (prob - static_cast<double>(y)) * inv_n;
      const double w = prob * (1.0 - prob) * inv_n;
      grad[lay.b0()] += resid;
      grad[lay.bs(s)] += resid;
      grad[lay.bq(q)] += resid;
      curv[lay.b0()] += w;
      curv[lay.bs(s)] += w;
      curv[lay.bq(q)] += w;
      for (std::size_t f = 0; f < lay.k; ++f) {
        grad[lay.u_bin(s) + f] += resid * v[f];
        grad[lay.v_bin(q) + f] += resid * u[f];
        curv[lay.u_bin(s) + f] += w * v[f] * v[f];
        curv[lay.v_bin(q) + f] += w * u[f] * u[f];
      }
    }
  }
  double penalty = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    penalty += p[i] * p[i];
    if (want_grad) {
      grad[i] += l2 * p[i] * inv_n;
      curv[i] += l2 * inv_n;
    }
  }
  return (nll + 0.5 * l2 * penalty) * inv_n;
}

double evaluate_categorical(const data::ResponseMatrix& matrix, const Layout& lay,
                            std::span<const double> p, double l2, std::span<double> grad,
                            std::span<double> curv) {
  const bool want_grad = !grad.empty();
  const double inv_n = 1.0 / static_cast<double>(matrix.n_observed());
  if (want_grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(curv.begin(), curv.end(), 0.0);
  }
  double nll = 0;
  for (std::size_t s = 0; s < matrix.n_students(); ++s) {
    const double* u = &p[lay.u_cat(s)];
    for (const auto& cell : matrix.row(s)) {
      const std::size_t q = static_cast<std::size_t>(cell.question);
      const std::size_t y = static_cast<std::size_t>(cell.answer_value - 1);
      double logits[4];
      double max_logit = -1e300;
      for (std::size_t c = 0; c < 4; ++c) {
        const double* v = &p[lay.v_cat(q, c)];
        double z = p[lay.bqc(q, c)];
        for (std::size_t f = 0; f < lay.k; ++f) z += u[f] * v[f];
        logits[c] = z;
        if (z > max_logit) max_logit = z;
      }
      double denom = 0;
      double probs[4];
      for (std::size_t c = 0; c < 4; ++c) {
        probs[c] = std::exp(logits[c] - max_logit);
        denom += probs[c];
      }
      for (std::size_t c = 0; c < 4; ++c) probs[c] /= denom;
      nll -= std::log(probs[y] > kProbEps ? probs[y] : kProbEps);
      if (!want_grad) continue;
      for (std::size_t c = 0; c < 4; ++c) {
        const double resid = (probs[c] - (c == y ? 1.0 : 0.0)) * inv_n;
        const double w = probs[c] * (1.0 - probs[c]) * inv_n;
        const double* v = &p[lay.v_cat(q, c)];
        grad[lay.bqc(q, c)] += resid;
        curv[lay.bqc(q, c)] += w;
        for (std::size_t f = 0; f < lay.k; ++f) {
          grad[lay.u_cat(s) + f] += resid * v[f];
          grad[lay.v_cat(q, c) + f] += resid * u[f];
          curv[lay.u_cat(s) + f] += w * v[f] * v[f];
          curv[lay.v_cat(q, c) + f] += w * u[f] * u[f];
        }
      }
    }
  }
  double penalty = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    penalty += p[i] * p[i];
    if (want_grad) {
      grad[i] += l2 * p[i] * inv_n;
      curv[i] += l2 * inv_n;
    }
  }
  return (nll + 0.5 * l2 * penalty) * inv_n;
}

}  // namespace

MfModel MfModel::fit(const data::ResponseMatrix& matrix, const MfConfig& config) {
  if (config.k < 1) throw std::invalid_argument("mf fit: k must be >= 1");
  if (matrix.n_observed() == 0) throw std::invalid_argument("mf fit: empty matrix");

  const Layout lay{matrix.n_students(), matrix.n_questions(),
                   static_cast<std::size_t>(config.k),
                   config.mode == PredictionMode::categorical};

  MfModel model;
  if (static_cast<std::size_t>(config.k) > std::min(lay.n, lay.m)) {
    model.warnings_.push_back("k = " + std::to_string(config.k) +
                              " exceeds min(n_students, n_questions) = " +
                              std::to_string(std::min(lay.n, lay.m)));
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  std::vector<double> params(lay.size(), 0.0);
  if (lay.categorical) {
    for (std::size_t i = lay.u_cat(0); i < lay.size(); ++i) params[i] = init(rng);
  } else {
    for (std::size_t i = lay.u_bin(0); i < lay.size(); ++i) params[i] = init(rng);
  }

  auto objective = [&](std::span<const double> p) {
    return lay.categorical ? evaluate_categorical(matrix, lay, p, config.l2, {}, {})
                           : evaluate_binary(matrix, lay, p, config.l2, {}, {});
  };
  auto grad_and_curv = [&](std::span<const double> p, std::span<double> g, std::span<double> c) {
    if (lay.categorical) {
      evaluate_categorical(matrix, lay, p, config.l2, g, c);
    } else {
      evaluate_binary(matrix, lay, p, config.l2, g, c);
    }
  };
  auto trace = detail::minimize_monotone(params, objective, grad_and_curv, config.epochs,
                                         config.learning_rate, "mf_fit");

  model.mode_ = config.mode;
  model.k_ = config.k;
  model.student_ids_ = matrix.student_ids();
  model.question_ids_ = matrix.question_ids();
  for (std::size_t i = 0; i < model.student_ids_.size(); ++i) {
    model.student_index_[model.student_ids_[i]] = i;
  }
  for (std::size_t j = 0; j < model.question_ids_.size(); ++j) {
    model.question_index_[model.question_ids_[j]] = j;
  }
  if (lay.categorical) {
    model.question_bias_.assign(params.begin(),
                                params.begin() + static_cast<std::ptrdiff_t>(lay.m * 4));
    model.student_factors_.assign(
        params.begin() + static_cast<std::ptrdiff_t>(lay.u_cat(0)),
        params.begin() + static_cast<std::ptrdiff_t>(lay.u_cat(0) + lay.n * lay.k));
    model.question_factors_.assign(params.begin() + static_cast<std::ptrdiff_t>(lay.v_cat(0, 0)),
                                   params.end());
  } else {
    model.global_bias_ = params[lay.b0()];
    model.student_bias_.assign(params.begin() + 1,
                               params.begin() + static_cast<std::ptrdiff_t>(1 + lay.n));
    model.question_bias_.assign(params.begin() + static_cast<std::ptrdiff_t>(1 + lay.n),
                                params.begin() + static_cast<std::ptrdiff_t>(1 + lay.n + lay.m));
    model.student_factors_.assign(
        params.begin() + static_cast<std::ptrdiff_t>(lay.u_bin(0)),
        params.begin() + static_cast<std::ptrdiff_t>(lay.u_bin(0) + lay.n * lay.k));
    model.question_factors_.assign(params.begin() + static_cast<std::ptrdiff_t>(lay.v_bin(0)),
                                   params.end());
  }
  model.loss_curve_ = std::move(trace.loss);
  return model;
}

MfModel MfModel::from_parameters(PredictionMode mode, int k, std::vector<Id> student_ids,
                                 std::vector<Id> question_ids, double global_bias,
                                 std::vector<double> student_bias,
                                 std::vector<double> question_bias,
                                 std::vector<double> student_factors,
                                 std::vector<double> question_factors) {
  const std::size_t n = student_ids.size();
  const std::size_t m = question_ids.size();
  const std::size_t kk = static_cast<std::size_t>(k);
  const bool categorical = mode == PredictionMode::categorical;
  if (student_factors.size() != n * kk ||
      question_factors.size() != (categorical ? m * 4 * kk : m * kk) ||
      question_bias.size() != (categorical ? m * 4 : m) ||
      student_bias.size() != (categorical ? 0 : n)) {
    throw std::invalid_argument("mf parameters: size mismatch");
  }
  MfModel model;
  model.mode_ = mode;
  model.k_ = k;
  model.student_ids_ = std::move(student_ids);
  model.question_ids_ = std::move(question_ids);
  model.global_bias_ = global_bias;
  model.student_bias_ = std::move(student_bias);
  model.question_bias_ = std::move(question_bias);
  model.student_factors_ = std::move(student_factors);
  model.question_factors_ = std::move(question_factors);
  for (std::size_t i = 0; i < model.student_ids_.size(); ++i) {
    model.student_index_[model.student_ids_[i]] = i;
  }
  for (std::size_t j = 0; j < model.question_ids_.size(); ++j) {
    model.question_index_[model.question_ids_[j]] = j;
  }
  return model;
}

std::size_t MfModel::student_index(Id user_id) const {
  auto it = student_index_.find(user_id);
  if (it == student_index_.end()) {
    throw std::out_of_range("unknown user id " + std::to_string(user_id));
  }
  return it->second;
}

std::size_t MfModel::question_index(Id question_id) const {
  auto it = question_index_.find(question_id);
  if (it == question_index_.end()) {
    throw std::out_of_range("unknown question id " + std::to_string(question_id));
  }
  return it->second;
}

double MfModel::prob_correct(Id user_id, Id question_id) const {
  if (mode_ != PredictionMode::binary) {
    throw std::logic_error("categorical MF model asked for a binary prediction");
  }
  const std::size_t s = student_index(user_id);
  const std::size_t q = question_index(question_id);
  const std::size_t kk = static_cast<std::size_t>(k_);
  double z = global_bias_ + student_bias_[s] + question_bias_[q];
  for (std::size_t f = 0; f < kk; ++f) {
    z += student_factors_[s * kk + f] * question_factors_[q * kk + f];
  }
  double p = sigmoid(z);
  if (p < kProbEps) p = kProbEps;
  if (p > 1.0 - kProbEps) p = 1.0 - kProbEps;
  return p;
}

std::array<double, 4> MfModel::choice_distribution(Id user_id, Id question_id) const {
  if (mode_ != PredictionMode::categorical) {
    throw std::logic_error("binary MF model asked for a categorical prediction");
  }
  const std::size_t s = student_index(user_id);
  const std::size_t q = question_index(question_id);
  const std::size_t kk = static_cast<std::size_t>(k_);
  std::array<double, 4> logits{};
  double max_logit = -1e300;
  for (std::size_t c = 0; c < 4; ++c) {
    double z = question_bias_[q * 4 + c];
    for (std::size_t f = 0; f < kk; ++f) {
      z += student_factors_[s * kk + f] * question_factors_[(q * 4 + c) * kk + f];
    }
    logits[c] = z;
    if (z > max_logit) max_logit = z;
  }
  std::array<double, 4> dist{};
  double denom = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    dist[c] = std::exp(logits[c] - max_logit);
    denom += dist[c];
  }
  for (double& v : dist) v /= denom;
  return dist;
}

}  // namespace diagq::models
