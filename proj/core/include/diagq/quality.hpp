#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "diagq/records.hpp"

namespace diagq::quality {

using data::Id;

/// Shannon entropy (base 2) of the empirical answer-option distribution,
/// in [0, 2]. Throws when the total count is zero.
double choice_entropy(const std::array<std::int64_t, 4>& counts);

/// Binary entropy of the correct/incorrect split, in [0, 1].
double correctness_entropy(std::int64_t n_correct, std::int64_t n_incorrect);

/// Per-question answer-option counts over the records.
std::unordered_map<Id, std::array<std::int64_t, 4>> choice_counts(
    std::span<const data::ResponseRecord> records);

enum class Condition { group, quiz };

/// Per-question answer-count-weighted mean of the correctness entropy within
/// each conditioning cell (GroupId or QuizId). Cells with fewer than 2
/// answers are excluded; questions with no qualifying cell are absent from
/// the result. Throws when a record's answer id is missing from the metadata.
std::unordered_map<Id, double> conditional_correctness_entropy(
    std::span<const data::ResponseRecord> records,
    const std::unordered_map<Id, data::AnswerMeta>& answers, Condition condition);

/// Per-question mean of reported confidence; questions with no confidence
/// values are absent. Records whose answer metadata is missing count as
/// having no confidence.
std::unordered_map<Id, double> mean_confidence(
    std::span<const data::ResponseRecord> records,
    const std::unordered_map<Id, data::AnswerMeta>& answers);

struct QualityFeatures {
  double choice_entropy = 0;
  double correctness_entropy = 0;
  std::optional<double> conditional_group_entropy;
  std::optional<double> conditional_quiz_entropy;
  std::optional<double> mean_confidence;
  std::int64_t support = 0;
};

std::unordered_map<Id, QualityFeatures> compute_quality_features(
    std::span<const data::ResponseRecord> records,
    const std::unordered_map<Id, data::AnswerMeta>& answers);

/// Total order over questions; rank 1 is the highest quality. Ranks are
/// always a bijection onto 1..N.
class QualityRanking {
 public:
  QualityRanking() = default;

  /// order[0] gets rank 1. Throws on duplicate question ids.
  static QualityRanking from_order(std::vector<Id> order);
  /// Validates that ranks form a permutation of 1..N.
  static QualityRanking from_ranks(const std::unordered_map<Id, int>& ranks);

  int rank_of(Id question_id) const;  // throws on unknown question
  bool contains(Id question_id) const;
  std::size_t size() const { return order_.size(); }
  const std::vector<Id>& order() const { return order_; }
  QualityRanking reversed() const;

 private:
  std::vector<Id> order_;
  std::unordered_map<Id, int> rank_of_;
};

enum class RankDirection { higher_is_better, lower_is_better };

/// Ranks `questions` by feature value. Ties break toward the smaller question
/// id. Questions missing from `values` rank after all present ones, ordered
/// by `fallback` when given (same direction handling) and by id otherwise.
QualityRanking rank_by_feature(std::span<const Id> questions,
                               const std::unordered_map<Id, double>& values,
                               RankDirection direction,
                               const std::unordered_map<Id, double>* fallback = nullptr,
                               RankDirection fallback_direction = RankDirection::higher_is_better);

/// Reranks by ascending mean rank across the input rankings; ties by id.
/// All rankings must cover the same question set.
QualityRanking aggregate_ranks_mean(std::span<const QualityRanking> rankings);

/// Min-max normalizes each feature dimension, then ranks by descending
/// weighted sum; ties by id. Every question must carry a vector of the same
/// dimension as `weights`.
QualityRanking weighted_feature_rank(
    const std::unordered_map<Id, std::vector<double>>& features, std::span<const double> weights);

struct ExpertJudgments {
  enum class Choice { left, right };
  struct QuestionPair {
    Id left = 0;
    Id right = 0;
  };
  std::vector<QuestionPair> pairs;
  std::map<Id, std::vector<Choice>> votes;  // expert id -> one vote per pair

  std::vector<Id> experts() const;
  /// Every expert must vote on every pair.
  void validate() const;
};

/// Fraction of judged pairs on which the ranking (lower rank number = higher
/// quality) agrees with the expert.
double agreement_fraction(const QualityRanking& ranking, const ExpertJudgments& judgments,
                          Id expert);

/// Maximum per-expert agreement and the achieving expert (ties to the
/// smallest expert id).
std::pair<double, Id> max_agreement(const QualityRanking& ranking,
                                    const ExpertJudgments& judgments);

// CSV formats: ranking files carry (QuestionId, ranking); judgment files
// carry (PairId, LeftQuestionId, RightQuestionId, ExpertId, Choice) with
// Choice either "left" or "right".
QualityRanking read_ranking_csv(const std::filesystem::path& path);
void write_ranking_csv(const std::filesystem::path& path, const QualityRanking& ranking);
ExpertJudgments read_judgments_csv(const std::filesystem::path& path);

}  // namespace diagq::quality
