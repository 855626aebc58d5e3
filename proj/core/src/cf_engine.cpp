#include "reqrec/cf_engine.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "reqrec/error.hpp"

namespace reqrec::cf {

namespace {

void require_stakeholder(const RatingMatrix& matrix, const StakeholderId& id) {
  if (!matrix.has_stakeholder(id)) {
    throw Error(ErrorCode::kUnknownStakeholder, "unknown stakeholder " + id.str());
  }
}

std::optional<double> mean_if_rated(const RatingMatrix& matrix, const StakeholderId& id) {
  if (matrix.row(id).empty()) return std::nullopt;
  return mean_rating(matrix, id);
}

SimilarityScore score_pair(const RatingMatrix& matrix, const StakeholderId& a,
                           std::optional<double> mean_a, const StakeholderId& b) {
  SimilarityScore score{.neighbor = b};
  const auto mean_b = mean_if_rated(matrix, b);
  if (!mean_a || !mean_b) return score;
  const auto terms = pearson_correlation(matrix.row(a), *mean_a, matrix.row(b), *mean_b);
  score.value = terms.value;
  score.corated_count = terms.corated_count;
  score.degenerate = terms.degenerate;
  return score;
}

// Ranking keys. Rounding first keeps mathematically equal values that
// picked up different rounding error in the same tie class.
long long similarity_key(double value) { return std::llround(value * 1e12); }
long long prediction_key(double value) { return std::llround(value * 1e9); }

bool ranks_before(const SimilarityScore& x, const SimilarityScore& y) {
  const auto kx = similarity_key(x.value), ky = similarity_key(y.value);
  if (kx != ky) return kx > ky;
  return x.neighbor < y.neighbor;
}

}  // namespace

std::string_view to_string(PredictionForm form) noexcept {
  return form == PredictionForm::kStandard ? "standard" : "paper-literal";
}

PredictionForm parse_prediction_form(std::string_view text) {
  if (text == "standard") return PredictionForm::kStandard;
  if (text == "paper-literal") return PredictionForm::kLiteral;
  throw Error(ErrorCode::kInvalidArgument,
              "prediction form must be 'standard' or 'paper-literal', got '" + std::string(text) + "'");
}

SimilarityScore pearson_similarity(const RatingMatrix& matrix, const StakeholderId& a,
                                   const StakeholderId& b) {
  require_stakeholder(matrix, a);
  require_stakeholder(matrix, b);
  if (a == b) {
    throw Error(ErrorCode::kSelfSimilarity, "similarity of " + a.str() + " with itself requested");
  }
  return score_pair(matrix, a, mean_if_rated(matrix, a), b);
}

NeighborSet select_neighbors(const RatingMatrix& matrix, const StakeholderId& target, int m) {
  require_stakeholder(matrix, target);
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "neighbor count must be >= 1");

  NeighborSet set{.target = target};
  const auto target_mean = mean_if_rated(matrix, target);
  std::vector<SimilarityScore> scores;
  scores.reserve(matrix.stakeholders().size());
  for (const auto& other : matrix.stakeholders()) {
    if (other.id == target) continue;
    scores.push_back(score_pair(matrix, target, target_mean, other.id));
  }
  const auto keep = std::min(scores.size(), static_cast<std::size_t>(m));
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(keep),
                    scores.end(), ranks_before);
  scores.resize(keep);
  set.neighbors = std::move(scores);
  return set;
}

Prediction predict_rating(const RatingMatrix& matrix, const StakeholderId& target,
                          const RequirementId& item, const NeighborSet& neighbors,
                          PredictionForm form) {
  require_stakeholder(matrix, target);
  if (!matrix.has_requirement(item)) {
    throw Error(ErrorCode::kUnknownRequirement, "unknown requirement " + item.str());
  }
  const auto& target_row = matrix.row(target);
  if (target_row.empty()) {
    throw Error(ErrorCode::kTargetHasNoRatings, "stakeholder " + target.str() + " has no ratings");
  }
  if (target_row.contains(item)) {
    throw Error(ErrorCode::kAlreadyRated,
                "stakeholder " + target.str() + " already rated " + item.str());
  }

  const double target_mean = mean_rating(matrix, target);
  double weighted = 0.0;
  double weight_sum = 0.0;
  std::size_t support = 0;
  for (const auto& neighbor : neighbors.neighbors) {
    // A weight that rounds to zero is rounding noise on an orthogonal pair.
    if (similarity_key(neighbor.value) == 0) continue;
    const auto score = matrix.get(neighbor.neighbor, item);
    if (!score) continue;
    const double deviation = *score - mean_rating(matrix, neighbor.neighbor);
    weighted += deviation * neighbor.value;
    weight_sum += std::abs(neighbor.value);
    ++support;
  }

  Prediction prediction{.requirement = item};
  if (weight_sum == 0.0) {
    prediction.raw_value = target_mean;
    prediction.neighbor_support = 0;
  } else {
    const double offset = weighted / weight_sum;
    prediction.raw_value = form == PredictionForm::kStandard ? target_mean + offset : offset;
    prediction.neighbor_support = support;
  }
  prediction.clamped_value = matrix.scale().clamp(prediction.raw_value);
  return prediction;
}

Recommendation recommend(const RatingMatrix& matrix, const StakeholderId& target,
                         const RecommendParams& params, PredictionForm form) {
  require_stakeholder(matrix, target);
  if (params.m_neighbors < 1) throw Error(ErrorCode::kInvalidArgument, "M must be >= 1");
  if (params.k_recommendations < 1) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  const auto& target_row = matrix.row(target);
  if (target_row.empty()) {
    throw Error(ErrorCode::kTargetHasNoRatings, "stakeholder " + target.str() + " has no ratings");
  }

  const auto neighbors = select_neighbors(matrix, target, params.m_neighbors);
  Recommendation result{.target = target, .params = params, .form = form};
  for (const auto& item : matrix.requirements()) {
    if (target_row.contains(item)) continue;
    result.items.push_back(predict_rating(matrix, target, item, neighbors, form));
  }
  std::sort(result.items.begin(), result.items.end(),
            [](const Prediction& x, const Prediction& y) {
              const auto kx = prediction_key(x.clamped_value), ky = prediction_key(y.clamped_value);
              if (kx != ky) return kx > ky;
              const bool x_supported = x.neighbor_support > 0;
              const bool y_supported = y.neighbor_support > 0;
              if (x_supported != y_supported) return x_supported;
              return x.requirement < y.requirement;
            });
  if (result.items.size() > static_cast<std::size_t>(params.k_recommendations)) {
    result.items.resize(static_cast<std::size_t>(params.k_recommendations));
  }
  return result;
}

}  // namespace reqrec::cf
