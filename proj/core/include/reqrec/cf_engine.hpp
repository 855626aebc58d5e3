#ifndef REQREC_CF_ENGINE_HPP_
#define REQREC_CF_ENGINE_HPP_

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "reqrec/domain.hpp"

namespace reqrec::cf {

/// kStandard is the Resnick predictor with the target's mean added back;
/// kLiteral drops that term and yields a bare weighted deviation.
enum class PredictionForm { kStandard, kLiteral };

std::string_view to_string(PredictionForm form) noexcept;
/// Accepts "standard" and "paper-literal".
PredictionForm parse_prediction_form(std::string_view text);

struct SimilarityScore {
  StakeholderId neighbor;
  double value = 0.0;
  std::size_t corated_count = 0;
  /// True when the correlation is undefined and value was forced to 0.
  bool degenerate = true;

  friend bool operator==(const SimilarityScore&, const SimilarityScore&) = default;
};

struct NeighborSet {
  StakeholderId target;
  /// Descending by value, ties by ascending neighbor id.
  std::vector<SimilarityScore> neighbors{};

  friend bool operator==(const NeighborSet&, const NeighborSet&) = default;
};

struct Prediction {
  RequirementId requirement;
  double raw_value = 0.0;
  double clamped_value = 0.0;
  /// Neighbors with a non-zero weight that rated the item; 0 means the value
  /// is the target-mean fallback.
  std::size_t neighbor_support = 0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// N seeds presented, M neighbors consulted, K items returned.
struct RecommendParams {
  int n_seeds = 3;
  int m_neighbors = 5;
  int k_recommendations = 5;

  friend bool operator==(const RecommendParams&, const RecommendParams&) = default;
};

struct Recommendation {
  StakeholderId target;
  std::vector<Prediction> items{};
  RecommendParams params;
  PredictionForm form = PredictionForm::kStandard;

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

struct CorrelationTerms {
  double value = 0.0;
  std::size_t corated_count = 0;
  bool degenerate = true;
};

/// Pearson correlation between two sparse rows given each row's mean over
/// its full rated set. Numerator and both variance sums run over the
/// co-rated keys only, which keeps |value| <= 1. Rows are any sorted
/// associative containers keyed by RequirementId with arithmetic values, so
/// real-valued rows can be correlated as well as matrix rows.
///
/// Degenerate (value 0) when fewer than two keys are shared or either
/// variance sum is zero.
template <class RowA, class RowB>
CorrelationTerms pearson_correlation(const RowA& a, double mean_a, const RowB& b, double mean_b) {
  CorrelationTerms terms;
  double cross = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      const double da = static_cast<double>(ia->second) - mean_a;
      const double db = static_cast<double>(ib->second) - mean_b;
      cross += da * db;
      var_a += da * da;
      var_b += db * db;
      ++terms.corated_count;
      ++ia;
      ++ib;
    }
  }
  if (terms.corated_count < 2 || var_a == 0.0 || var_b == 0.0) return terms;
  terms.value = cross / (std::sqrt(var_a) * std::sqrt(var_b));
  terms.degenerate = false;
  return terms;
}

/// Similarity between two distinct registered stakeholders. A stakeholder
/// with no ratings yields a degenerate score.
///
/// Throws kUnknownStakeholder or kSelfSimilarity.
SimilarityScore pearson_similarity(const RatingMatrix& matrix, const StakeholderId& a,
                                   const StakeholderId& b);

/// Scores every other registered stakeholder against the target and keeps
/// the best m. Degenerate scores sort as 0; negative scores are kept.
/// Values that agree to 12 decimal places are ties and go by ascending id.
NeighborSet select_neighbors(const RatingMatrix& matrix, const StakeholderId& target, int m);

/// Neighbors whose weight rounds to zero at 12 decimal places are skipped.
Prediction predict_rating(const RatingMatrix& matrix, const StakeholderId& target,
                          const RequirementId& item, const NeighborSet& neighbors,
                          PredictionForm form = PredictionForm::kStandard);

/// Full pipeline for one target: neighbors, a prediction for every item the
/// target has not rated, then the top K by clamped value. Clamped values
/// that agree to 9 decimal places are equal; equal values rank supported
/// predictions before fallbacks, then ascending id.
Recommendation recommend(const RatingMatrix& matrix, const StakeholderId& target,
                         const RecommendParams& params,
                         PredictionForm form = PredictionForm::kStandard);

}  // namespace reqrec::cf

#endif  // REQREC_CF_ENGINE_HPP_
