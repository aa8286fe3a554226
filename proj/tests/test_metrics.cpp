#include <doctest.h>

#include <random>

#include "diagq/metrics.hpp"

using namespace diagq::models;

namespace {

class ConstantProb final : public Predictor {
 public:
  explicit ConstantProb(double p) : p_(p) {}
  bool supports(PredictionMode mode) const noexcept override {
    return mode == PredictionMode::binary;
  }
  double prob_correct(Id, Id) const override { return p_; }

 private:
  double p_;
};

class ConstantDist final : public Predictor {
 public:
  explicit ConstantDist(std::array<double, 4> d) : d_(d) {}
  bool supports(PredictionMode mode) const noexcept override {
    return mode == PredictionMode::categorical;
  }
  std::array<double, 4> choice_distribution(Id, Id) const override { return d_; }

 private:
  std::array<double, 4> d_;
};

}  // namespace

TEST_CASE("accuracy hand counts") {
  std::vector<int> a{1, 0, 1, 1}, b{1, 1, 1, 0};
  CHECK(accuracy(a, b) == doctest::Approx(0.5));
  std::vector<int> c{2, 3, 4}, d{2, 3, 1};
  CHECK(accuracy(c, d) == doctest::Approx(2.0 / 3.0));
  CHECK(accuracy(a, a) == 1.0);
}

TEST_CASE("accuracy errors") {
  std::vector<int> a{1}, b{1, 0}, empty;
  CHECK_THROWS_AS(accuracy(a, b), std::invalid_argument);
  CHECK_THROWS_AS(accuracy(empty, empty), std::invalid_argument);
}

TEST_CASE("accuracy is permutation-invariant and 1 on identical vectors") {
  std::mt19937_64 rng(2);
  for (int iter = 0; iter < 30; ++iter) {
    std::size_t n = 1 + rng() % 30;
    std::vector<int> preds(n), truth(n), order(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = static_cast<int>(rng() % 4) + 1;
      truth[i] = static_cast<int>(rng() % 4) + 1;
      order[i] = static_cast<int>(i);
    }
    CHECK(accuracy(preds, preds) == 1.0);
    double base = accuracy(preds, truth);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    std::vector<int> preds_p(n), truth_p(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds_p[i] = preds[static_cast<std::size_t>(order[i])];
      truth_p[i] = truth[static_cast<std::size_t>(order[i])];
    }
    CHECK(accuracy(preds_p, truth_p) == doctest::Approx(base));
  }
}

TEST_CASE("confusion_matrix hand tally") {
  std::vector<int> preds{1, 1, 0}, truth{1, 0, 0};
  auto counts = confusion_matrix(preds, truth, 2);
  CHECK(counts[0][0] == 1);
  CHECK(counts[0][1] == 1);
  CHECK(counts[1][0] == 0);
  CHECK(counts[1][1] == 1);
}

TEST_CASE("confusion_matrix of perfect predictions is diagonal") {
  std::vector<int> labels{1, 2, 3, 4, 2, 2};
  auto counts = confusion_matrix(labels, labels, 4, 1);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == 0);
    }
  }
  CHECK(counts[1][1] == 3);
}

TEST_CASE("confusion_matrix row sums equal per-class truth counts") {
  std::mt19937_64 rng(3);
  std::vector<int> preds, truth;
  for (int i = 0; i < 100; ++i) {
    preds.push_back(static_cast<int>(rng() % 4) + 1);
    truth.push_back(static_cast<int>(rng() % 4) + 1);
  }
  auto counts = confusion_matrix(preds, truth, 4, 1);
  std::int64_t total = 0;
  for (int cls = 1; cls <= 4; ++cls) {
    std::int64_t row = 0;
    for (int j = 0; j < 4; ++j) row += counts[static_cast<std::size_t>(cls - 1)][static_cast<std::size_t>(j)];
    CHECK(row == std::count(truth.begin(), truth.end(), cls));
    total += row;
  }
  CHECK(total == 100);
}

TEST_CASE("confusion_matrix rejects out-of-range labels") {
  std::vector<int> preds{5}, truth{1};
  CHECK_THROWS_AS(confusion_matrix(preds, truth, 4, 1), std::out_of_range);
}

TEST_CASE("ensemble_prob averages member probabilities") {
  ConstantProb low(0.2), high(0.8);
  std::vector<const Predictor*> one{&low};
  CHECK(ensemble_prob(one, 0, 0) == doctest::Approx(0.2));
  std::vector<const Predictor*> two{&low, &high};
  CHECK(ensemble_prob(two, 0, 0) == doctest::Approx(0.5));
}

TEST_CASE("ensemble_distribution stays a distribution") {
  ConstantDist a({0.7, 0.1, 0.1, 0.1}), b({0.1, 0.3, 0.3, 0.3});
  std::vector<const Predictor*> members{&a, &b};
  auto mean = ensemble_distribution(members, 0, 0);
  double total = 0;
  for (double v : mean) {
    CHECK(v >= 0);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean[0] == doctest::Approx(0.4));
}

TEST_CASE("ensemble rejects mode mismatches") {
  ConstantProb binary(0.2);
  ConstantDist categorical({0.25, 0.25, 0.25, 0.25});
  std::vector<const Predictor*> members{&binary, &categorical};
  CHECK_THROWS_AS(ensemble_prob(members, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(ensemble_distribution(members, 0, 0), std::invalid_argument);
  std::vector<const Predictor*> empty;
  CHECK_THROWS_AS(ensemble_prob(empty, 0, 0), std::invalid_argument);
}

TEST_CASE("predict_pairs labels follow the threshold and argmax rules") {
  ConstantProb p(0.49);
  std::vector<std::pair<Id, Id>> pairs{{1, 2}};
  auto set = predict_pairs(p, pairs, PredictionMode::binary);
  CHECK(set.labels == std::vector<int>{0});

  ConstantProb q(0.5);
  CHECK(predict_pairs(q, pairs, PredictionMode::binary).labels == std::vector<int>{1});

  ConstantDist tie({0.3, 0.3, 0.2, 0.2});
  auto cat = predict_pairs(tie, pairs, PredictionMode::categorical);
  CHECK(cat.labels == std::vector<int>{1});  // smallest option wins the tie
  CHECK_THROWS_AS(predict_pairs(tie, pairs, PredictionMode::binary), std::invalid_argument);
}

TEST_CASE("argmax_choice breaks ties toward the smallest option") {
  CHECK(argmax_choice({0.1, 0.4, 0.4, 0.1}) == 2);
  CHECK(argmax_choice({0.25, 0.25, 0.25, 0.25}) == 1);
  CHECK(argmax_choice({0.0, 0.0, 0.0, 1.0}) == 4);
}
