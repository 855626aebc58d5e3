#include "reqrec/session.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <string>

#include "reqrec/error.hpp"

namespace reqrec {

namespace {

void require_state(const Session& session, SessionState expected) {
  if (session.state != expected) {
    throw Error(ErrorCode::kWrongState, "session " + session.id.str() + " is in state " +
                                            std::string(to_string(session.state)) + ", expected " +
                                            std::string(to_string(expected)));
  }
}

}  // namespace

Clock system_clock() {
  return [] {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
  };
}

void SessionConfig::validate() const {
  if (n_seeds < 1) throw Error(ErrorCode::kInvalidArgument, "N must be >= 1");
  if (m_neighbors < 1) throw Error(ErrorCode::kInvalidArgument, "M must be >= 1");
  if (k_recommendations < 1) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  scale.validate();
}

std::string_view to_string(SessionState state) noexcept {
  switch (state) {
    case SessionState::kSeedsPresented: return "seeds_presented";
    case SessionState::kSeedsRated: return "seeds_rated";
    case SessionState::kRecommended: return "recommended";
    case SessionState::kFeedbackCollected: return "feedback_collected";
  }
  return "seeds_presented";
}

SessionState parse_session_state(std::string_view text) {
  for (auto state : {SessionState::kSeedsPresented, SessionState::kSeedsRated,
                     SessionState::kRecommended, SessionState::kFeedbackCollected}) {
    if (to_string(state) == text) return state;
  }
  throw Error(ErrorCode::kParseError, "unknown session state '" + std::string(text) + "'");
}

namespace workflow {

std::vector<RequirementId> select_seeds(const Catalog& catalog, const RatingMatrix& matrix, int n) {
  if (n < 0 || catalog.size() < static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kCatalogTooSmall, "catalog has " + std::to_string(catalog.size()) +
                                                 " requirements, " + std::to_string(n) +
                                                 " seeds requested");
  }
  const auto count = static_cast<std::size_t>(n);
  std::vector<RequirementId> ids = catalog.ids();
  if (matrix.entry_count() == 0) {
    ids.resize(count);
    return ids;
  }
  std::vector<std::pair<std::size_t, RequirementId>> ranked;
  ranked.reserve(ids.size());
  for (auto& id : ids) ranked.emplace_back(matrix.rater_count(id), std::move(id));
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<RequirementId> seeds;
  seeds.reserve(count);
  for (std::size_t i = 0; i < count; ++i) seeds.push_back(ranked[i].second);
  return seeds;
}

Session start_session(SessionId id, const Stakeholder& stakeholder, const SessionConfig& config,
                      const Catalog& catalog, RatingMatrix& matrix, Timestamp now) {
  config.validate();
  Session session;
  session.presented_seeds = select_seeds(catalog, matrix, config.n_seeds);
  matrix.add_stakeholder(stakeholder);
  session.id = std::move(id);
  session.stakeholder = stakeholder;
  session.state = SessionState::kSeedsPresented;
  session.created_at = now;
  session.updated_at = now;
  return session;
}

RepertoryGrid seed_grid(const Session& session, const Catalog& catalog, const RatingScale& scale) {
  std::vector<Requirement> rows;
  rows.reserve(session.presented_seeds.size());
  for (const auto& id : session.presented_seeds) {
    const auto* requirement = catalog.find(id);
    if (requirement == nullptr) {
      throw Error(ErrorCode::kUnknownRequirement, "seed " + id.str() + " is not in the catalog");
    }
    rows.push_back(*requirement);
  }
  return RepertoryGrid(std::move(rows), scale);
}

void submit_seed_ratings(Session& session, RatingMatrix& matrix, std::span<const ItemScore> ratings,
                         Timestamp now) {
  require_state(session, SessionState::kSeedsPresented);
  const std::set<RequirementId> presented(session.presented_seeds.begin(),
                                          session.presented_seeds.end());
  std::set<RequirementId> rated;
  for (const auto& r : ratings) {
    if (!presented.contains(r.requirement_id)) {
      throw Error(ErrorCode::kWrongItems,
                  "requirement " + r.requirement_id.str() + " was not presented in this session");
    }
    if (!rated.insert(r.requirement_id).second) {
      throw Error(ErrorCode::kWrongItems, "requirement " + r.requirement_id.str() + " rated twice");
    }
    if (!matrix.scale().contains(r.score)) {
      throw Error(ErrorCode::kOutOfScale, "score " + std::to_string(r.score) + " for " +
                                              r.requirement_id.str() + " is outside the scale");
    }
  }
  if (rated != presented) {
    throw Error(ErrorCode::kWrongItems, "every presented requirement must be rated exactly once");
  }
  if (!matrix.has_stakeholder(session.stakeholder.id)) {
    throw Error(ErrorCode::kUnknownStakeholder,
                "stakeholder " + session.stakeholder.id.str() + " is not registered");
  }
  for (const auto& r : ratings) {
    if (!matrix.has_requirement(r.requirement_id)) {
      throw Error(ErrorCode::kUnknownRequirement, "unknown requirement " + r.requirement_id.str());
    }
  }

  for (const auto& r : ratings) matrix.set(session.stakeholder.id, r.requirement_id, r.score);
  session.state = SessionState::kSeedsRated;
  session.updated_at = now;
}

void get_recommendations(Session& session, const SessionConfig& config, const RatingMatrix& matrix,
                         Timestamp now) {
  require_state(session, SessionState::kSeedsRated);
  auto rec = cf::recommend(matrix, session.stakeholder.id, config.params(), config.prediction_form);
  session.recommendation = std::move(rec);
  session.state = SessionState::kRecommended;
  session.updated_at = now;
}

void submit_feedback(Session& session, std::span<const ItemStars> feedback, Timestamp now) {
  require_state(session, SessionState::kRecommended);
  std::set<RequirementId> recommended;
  for (const auto& p : session.recommendation->items) recommended.insert(p.requirement);
  std::set<RequirementId> seen;
  for (const auto& f : feedback) {
    if (!recommended.contains(f.requirement_id)) {
      throw Error(ErrorCode::kUnknownRecommendedItem,
                  "requirement " + f.requirement_id.str() + " was not recommended in this session");
    }
    if (f.stars < 0 || f.stars > kMaxStars) {
      throw Error(ErrorCode::kStarsOutOfRange,
                  "stars must be in [0, 5], got " + std::to_string(f.stars));
    }
    if (!seen.insert(f.requirement_id).second) {
      throw Error(ErrorCode::kWrongItems,
                  "feedback for " + f.requirement_id.str() + " given twice");
    }
  }

  std::vector<FeedbackRecord> records;
  records.reserve(feedback.size());
  for (const auto& f : feedback) {
    records.push_back({session.id, f.requirement_id, f.stars, session.stakeholder.education_level});
  }
  session.feedback = std::move(records);
  session.state = SessionState::kFeedbackCollected;
  session.updated_at = now;
}

}  // namespace workflow
}  // namespace reqrec
