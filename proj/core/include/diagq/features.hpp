#pragma once

#include <span>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "diagq/dataset.hpp"

namespace diagq::models {

struct TargetStat {
  double mean = 0;          // Laplace-smoothed toward the global mean
  std::int64_t count = 0;   // raw group size
};

/// Per-group smoothed mean of IsCorrect. The key function maps a record to a
/// hashable group key (typically via captured student/question/answer
/// metadata) and may throw to reject unresolvable records. alpha is the
/// Laplace pseudo-count pulling small groups toward the global mean.
template <class KeyFn>
auto target_encode(std::span<const data::ResponseRecord> records, KeyFn&& key,
                   double alpha = 1.0) {
  using Key = std::remove_cvref_t<std::invoke_result_t<KeyFn&, const data::ResponseRecord&>>;
  struct RawStat {
    std::int64_t count = 0;
    std::int64_t correct = 0;
  };
  std::unordered_map<Key, RawStat> raw;
  std::int64_t total = 0, total_correct = 0;
  for (const auto& r : records) {
    auto& stat = raw[key(r)];
    ++stat.count;
    stat.correct += r.is_correct;
    ++total;
    total_correct += r.is_correct;
  }
  const double global_mean =
      total > 0 ? static_cast<double>(total_correct) / static_cast<double>(total) : 0.0;
  std::unordered_map<Key, TargetStat> out;
  out.reserve(raw.size());
  for (const auto& [k, stat] : raw) {
    out[k] = TargetStat{
        (static_cast<double>(stat.correct) + alpha * global_mean) /
            (static_cast<double>(stat.count) + alpha),
        stat.count};
  }
  return out;
}

/// Truncated SVD of the binary response matrix: observed cells are centered
/// by the global correctness mean, missing cells imputed as zero. Vectors are
/// row-major; reconstruction is student_vectors * diag(s) * question_vectors^T.
struct SvdFeatures {
  std::size_t n_students = 0;
  std::size_t n_questions = 0;
  int k = 0;
  std::vector<double> student_vectors;   // n_students x k
  std::vector<double> question_vectors;  // n_questions x k
  std::vector<double> singular_values;   // k, non-negative, non-increasing

  std::span<const double> student(std::size_t i) const {
    return {student_vectors.data() + i * static_cast<std::size_t>(k),
            static_cast<std::size_t>(k)};
  }
  std::span<const double> question(std::size_t j) const {
    return {question_vectors.data() + j * static_cast<std::size_t>(k),
            static_cast<std::size_t>(k)};
  }
};

SvdFeatures svd_features(const data::ResponseMatrix& matrix, int k);

/// Frobenius error between the centered/imputed dense matrix and the rank-k
/// reconstruction; non-increasing in k.
double svd_reconstruction_error(const data::ResponseMatrix& matrix, const SvdFeatures& features);

}  // namespace diagq::models
