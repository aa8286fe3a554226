#include "diagq/predictor.hpp"

#include <stdexcept>

namespace diagq::models {

double Predictor::prob_correct(Id, Id) const {
  throw std::logic_error("model does not support binary prediction");
}

std::array<double, 4> Predictor::choice_distribution(Id, Id) const {
  throw std::logic_error("model does not support categorical prediction");
}

int argmax_choice(const std::array<double, 4>& dist) noexcept {
  int best = 0;
  for (int c = 1; c < 4; ++c) {
    if (dist[static_cast<std::size_t>(c)] > dist[static_cast<std::size_t>(best)]) best = c;
  }
  return best + 1;
}

PredictionSet predict_pairs(const Predictor& model, std::span<const std::pair<Id, Id>> pairs,
                            PredictionMode mode) {
  if (!model.supports(mode)) throw std::invalid_argument("model does not support requested mode");
  PredictionSet out;
  out.mode = mode;
  out.pairs.assign(pairs.begin(), pairs.end());
  out.labels.reserve(pairs.size());
  if (mode == PredictionMode::binary) {
    out.probabilities.reserve(pairs.size());
    for (const auto& [user, question] : pairs) {
      double p = model.prob_correct(user, question);
      out.probabilities.push_back(p);
      out.labels.push_back(p >= 0.5 ? 1 : 0);
    }
  } else {
    out.distributions.reserve(pairs.size());
    for (const auto& [user, question] : pairs) {
      auto dist = model.choice_distribution(user, question);
      out.labels.push_back(argmax_choice(dist));
      out.distributions.push_back(dist);
    }
  }
  return out;
}

}  // namespace diagq::models
