#ifndef REQREC_SESSION_HPP_
#define REQREC_SESSION_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "reqrec/cf_engine.hpp"
#include "reqrec/domain.hpp"

namespace reqrec {

/// Milliseconds since the Unix epoch.
using Timestamp = std::int64_t;
using Clock = std::function<Timestamp()>;

Clock system_clock();

struct SessionConfig {
  int n_seeds = 3;
  int m_neighbors = 5;
  int k_recommendations = 5;
  RatingScale scale;
  cf::PredictionForm prediction_form = cf::PredictionForm::kStandard;

  cf::RecommendParams params() const { return {n_seeds, m_neighbors, k_recommendations}; }
  /// Throws kInvalidArgument on non-positive counts or a bad scale.
  void validate() const;
};

enum class SessionState { kSeedsPresented, kSeedsRated, kRecommended, kFeedbackCollected };

std::string_view to_string(SessionState state) noexcept;
SessionState parse_session_state(std::string_view text);

/// One star rating on a recommended requirement. 0 stars means "no idea";
/// 1..5 is ascending satisfaction.
struct FeedbackRecord {
  SessionId session_id;
  RequirementId requirement_id;
  int stars = 0;
  EducationLevel education_level = EducationLevel::kUnspecified;

  bool no_idea() const noexcept { return stars == 0; }

  friend bool operator==(const FeedbackRecord&, const FeedbackRecord&) = default;
};

inline constexpr int kMaxStars = 5;

struct Session {
  SessionId id;
  Stakeholder stakeholder;
  SessionState state = SessionState::kSeedsPresented;
  std::vector<RequirementId> presented_seeds;
  std::optional<cf::Recommendation> recommendation;
  std::vector<FeedbackRecord> feedback;
  Timestamp created_at = 0;
  Timestamp updated_at = 0;

  friend bool operator==(const Session&, const Session&) = default;
};

struct ItemScore {
  RequirementId requirement_id;
  int score = 0;
};

struct ItemStars {
  RequirementId requirement_id;
  int stars = 0;
};

namespace workflow {

/// The n most-rated catalog requirements (ties by ascending id). An empty
/// matrix falls back to the first n in catalog order.
std::vector<RequirementId> select_seeds(const Catalog& catalog, const RatingMatrix& matrix, int n);

/// Registers the stakeholder in the matrix if needed and presents the seeds.
/// Throws kCatalogTooSmall when the catalog has fewer than n_seeds entries.
Session start_session(SessionId id, const Stakeholder& stakeholder, const SessionConfig& config,
                      const Catalog& catalog, RatingMatrix& matrix, Timestamp now);

/// The seed rows of a session as a repertory grid.
RepertoryGrid seed_grid(const Session& session, const Catalog& catalog, const RatingScale& scale);

// The transitions below validate everything before touching the session or
// the matrix: on any error nothing has changed.

/// Throws kWrongState, kWrongItems (rated set differs from the seeds or
/// repeats an item) or kOutOfScale.
void submit_seed_ratings(Session& session, RatingMatrix& matrix, std::span<const ItemScore> ratings,
                         Timestamp now);

/// Throws kWrongState or any error from cf::recommend.
void get_recommendations(Session& session, const SessionConfig& config, const RatingMatrix& matrix,
                         Timestamp now);

/// Accepts any subset of the recommended items, each at most once.
/// Throws kWrongState, kUnknownRecommendedItem, kStarsOutOfRange or
/// kWrongItems (repeated item).
void submit_feedback(Session& session, std::span<const ItemStars> feedback, Timestamp now);

}  // namespace workflow
}  // namespace reqrec

#endif  // REQREC_SESSION_HPP_
