#include "diagq/features.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>

namespace diagq::models {

namespace {

Eigen::MatrixXd dense_centered(const data::ResponseMatrix& matrix) {
  const auto n = static_cast<Eigen::Index>(matrix.n_students());
  const auto m = static_cast<Eigen::Index>(matrix.n_questions());
  double mean = 0;
  for (std::size_t s = 0; s < matrix.n_students(); ++s) {
    for (const auto& cell : matrix.row(s)) mean += cell.is_correct;
  }
  if (matrix.n_observed() > 0) mean /= static_cast<double>(matrix.n_observed());

  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, m);
  for (std::size_t s = 0; s < matrix.n_students(); ++s) {
    for (const auto& cell : matrix.row(s)) {
      dense(static_cast<Eigen::Index>(s), cell.question) =
          static_cast<double>(cell.is_correct) - mean;
    }
  }
  return dense;
}

}  // namespace

SvdFeatures svd_features(const data::ResponseMatrix& matrix, int k) {
  const std::size_t n = matrix.n_students();
  const std::size_t m = matrix.n_questions();
  if (k < 1 || static_cast<std::size_t>(k) > std::min(n, m)) {
    throw std::invalid_argument("svd_features: k out of range [1, min(n, m)]");
  }
  Eigen::MatrixXd dense = dense_centered(matrix);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SvdFeatures out;
  out.n_students = n;
  out.n_questions = m;
  out.k = k;
  const std::size_t kk = static_cast<std::size_t>(k);
  out.student_vectors.resize(n * kk);
  out.question_vectors.resize(m * kk);
  out.singular_values.resize(kk);
  for (std::size_t f = 0; f < kk; ++f) {
    out.singular_values[f] = svd.singularValues()(static_cast<Eigen::Index>(f));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < kk; ++f) {
      out.student_vectors[i * kk + f] =
          svd.matrixU()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t f = 0; f < kk; ++f) {
      out.question_vectors[j * kk + f] =
          svd.matrixV()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(f));
    }
  }
  return out;
}

double svd_reconstruction_error(const data::ResponseMatrix& matrix, const SvdFeatures& features) {
  Eigen::MatrixXd dense = dense_centered(matrix);
  const std::size_t kk = static_cast<std::size_t>(features.k);
  double err = 0;
  for (std::size_t i = 0; i < features.n_students; ++i) {
    for (std::size_t j = 0; j < features.n_questions; ++j) {
      double recon = 0;
      for (std::size_t f = 0; f < kk; ++f) {
        recon += features.student_vectors[i * kk + f] * features.singular_values[f] *
                 features.question_vectors[j * kk + f];
      }
      double diff = dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - recon;
      err += diff * diff;
    }
  }
  return std::sqrt(err);
}

}  // namespace diagq::models
