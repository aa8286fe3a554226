#include <iostream>
#include <sstream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "diagq/quality.hpp"

namespace diagq::cli {

namespace {

using data::Id;

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> weights;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) weights.push_back(std::stod(part));
  return weights;
}

}  // namespace

int cmd_rank(const RankOptions& options) {
  auto records = data::parse_records(options.input);
  std::unordered_map<Id, data::AnswerMeta> answers;
  if (!options.answers.empty()) answers = data::parse_answer_metadata(options.answers);

  auto features = quality::compute_quality_features(records, answers);
  std::vector<Id> questions;
  questions.reserve(features.size());
  for (const auto& [question, _] : features) questions.push_back(question);

  std::unordered_map<Id, double> choice_entropy, correctness_entropy, confidence;
  for (const auto& [question, f] : features) {
    choice_entropy[question] = f.choice_entropy;
    correctness_entropy[question] = f.correctness_entropy;
    if (f.mean_confidence) confidence[question] = *f.mean_confidence;
  }

  quality::QualityRanking ranking;
  if (options.method == "entropy") {
    ranking = quality::rank_by_feature(questions, choice_entropy,
                                       quality::RankDirection::higher_is_better);
  } else if (options.method == "confidence") {
    // Questions without confidence data fall back to the entropy ordering,
    // placed after every confidence-bearing question.
    ranking = quality::rank_by_feature(questions, confidence,
                                       quality::RankDirection::higher_is_better, &choice_entropy,
                                       quality::RankDirection::higher_is_better);
  } else if (options.method == "weighted") {
    auto weights = parse_weights(options.weights);
    if (weights.size() != 5) {
      throw std::invalid_argument(
          "weighted method needs 5 weights: choice entropy, correctness entropy, "
          "group-conditional entropy, quiz-conditional entropy, mean confidence");
    }
    // Absent conditional entropies fall back to the unconditional value;
    // absent confidences to the mean of the present ones.
    double confidence_fallback = 0;
    if (!confidence.empty()) {
      for (const auto& [_, v] : confidence) confidence_fallback += v;
      confidence_fallback /= static_cast<double>(confidence.size());
    }
    std::unordered_map<Id, std::vector<double>> vectors;
    for (const auto& [question, f] : features) {
      vectors[question] = {
          f.choice_entropy, f.correctness_entropy,
          f.conditional_group_entropy.value_or(f.correctness_entropy),
          f.conditional_quiz_entropy.value_or(f.correctness_entropy),
          f.mean_confidence.value_or(confidence_fallback)};
    }
    ranking = quality::weighted_feature_rank(vectors, weights);
  } else if (options.method == "average-rank") {
    std::vector<quality::QualityRanking> parts;
    parts.push_back(quality::rank_by_feature(questions, choice_entropy,
                                             quality::RankDirection::higher_is_better));
    parts.push_back(quality::rank_by_feature(questions, correctness_entropy,
                                             quality::RankDirection::higher_is_better));
    if (!confidence.empty()) {
      parts.push_back(quality::rank_by_feature(questions, confidence,
                                               quality::RankDirection::higher_is_better,
                                               &choice_entropy,
                                               quality::RankDirection::higher_is_better));
    }
    ranking = quality::aggregate_ranks_mean(parts);
  } else {
    throw std::invalid_argument(
        "method must be 'entropy', 'confidence', 'weighted' or 'average-rank'");
  }

  quality::write_ranking_csv(options.output, ranking);
  std::cout << "questions: " << ranking.size() << "\n"
            << "ranking: " << options.output << "\n";
  return 0;
}

}  // namespace diagq::cli
