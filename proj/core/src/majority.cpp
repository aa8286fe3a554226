#include "diagq/majority.hpp"

#include <stdexcept>

namespace diagq::models {

MajorityModel MajorityModel::fit(const data::ResponseMatrix& matrix) {
  if (matrix.n_observed() == 0) throw std::invalid_argument("majority fit: empty matrix");
  MajorityModel model;
  model.stats_.reserve(matrix.n_questions());
  for (std::size_t s = 0; s < matrix.n_students(); ++s) {
    for (const auto& e : matrix.row(s)) {
      auto& q = model.stats_[matrix.question_id(static_cast<std::size_t>(e.question))];
      ++q.n;
      q.n_correct += e.is_correct;
      ++q.choice_counts[static_cast<std::size_t>(e.answer_value - 1)];
      ++model.global_.n;
      model.global_.n_correct += e.is_correct;
      ++model.global_.choice_counts[static_cast<std::size_t>(e.answer_value - 1)];
    }
  }
  return model;
}

MajorityModel MajorityModel::from_stats(std::unordered_map<Id, QuestionStats> stats,
                                        QuestionStats global) {
  MajorityModel model;
  model.stats_ = std::move(stats);
  model.global_ = global;
  return model;
}

const MajorityModel::QuestionStats& MajorityModel::stats_for(Id question_id) const {
  auto it = stats_.find(question_id);
  return it == stats_.end() ? global_ : it->second;
}

int MajorityModel::predict_binary(Id question_id) const {
  const auto& q = stats_for(question_id);
  // Tie goes to the smaller label.
  return 2 * q.n_correct > q.n ? 1 : 0;
}

int MajorityModel::predict_choice(Id question_id) const {
  const auto& q = stats_for(question_id);
  int best = 0;
  for (int c = 1; c < 4; ++c) {
    if (q.choice_counts[static_cast<std::size_t>(c)] >
        q.choice_counts[static_cast<std::size_t>(best)]) {
      best = c;
    }
  }
  return best + 1;
}

double MajorityModel::prob_correct(Id, Id question_id) const {
  const auto& q = stats_for(question_id);
  if (q.n == 0) return 0.5;
  return static_cast<double>(q.n_correct) / static_cast<double>(q.n);
}

std::array<double, 4> MajorityModel::choice_distribution(Id, Id question_id) const {
  const auto& q = stats_for(question_id);
  std::array<double, 4> dist{0.25, 0.25, 0.25, 0.25};
  if (q.n == 0) return dist;
  for (std::size_t c = 0; c < 4; ++c) {
    dist[c] = static_cast<double>(q.choice_counts[c]) / static_cast<double>(q.n);
  }
  return dist;
}

}  // namespace diagq::models
