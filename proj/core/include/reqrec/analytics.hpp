#ifndef REQREC_ANALYTICS_HPP_
#define REQREC_ANALYTICS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reqrec/datastore.hpp"
#include "reqrec/domain.hpp"
#include "reqrec/session.hpp"

namespace reqrec::analytics {

struct LevelSummary {
  /// Distinct sessions with at least one record at this level.
  std::size_t participant_count = 0;
  /// Mean over records with stars >= 1; absent when there are none.
  std::optional<double> mean_stars;
  std::size_t rated_count = 0;
  std::size_t no_idea_count = 0;

  friend bool operator==(const LevelSummary&, const LevelSummary&) = default;
};

struct SatisfactionReport {
  /// Always holds all four education levels.
  std::map<EducationLevel, LevelSummary> per_level;
  LevelSummary overall;
  /// overall.mean_stars / 5 * 100.
  std::optional<double> normalized_percentage;

  friend bool operator==(const SatisfactionReport&, const SatisfactionReport&) = default;
};

/// Order of the input does not affect the result.
SatisfactionReport satisfaction_report(std::span<const FeedbackRecord> feedback);

std::string report_json(const SatisfactionReport& report);
std::string report_table(const SatisfactionReport& report);

/// Knobs for a synthetic population. The first `panel` stakeholders rate the
/// whole catalog up front; the remaining `participants` each run one
/// elicitation session against the panel.
struct PopulationSpec {
  std::uint64_t seed = 42;
  std::size_t panel = 50;
  std::size_t participants = 100;
  std::size_t clusters = 2;
  double noise = 0.0;
};

struct SimulatedPopulation {
  std::uint64_t seed = 0;
  std::size_t panel = 0;
  double noise_level = 0.0;
  /// Latent preference per stakeholder per catalog entry, in scale units.
  std::vector<std::vector<double>> profiles{};
  std::vector<std::size_t> cluster_of{};
  std::vector<EducationLevel> education{};

  std::size_t size() const noexcept { return profiles.size(); }
  std::size_t participants() const noexcept { return size() - panel; }

  friend bool operator==(const SimulatedPopulation&, const SimulatedPopulation&) = default;
};

/// Cluster profiles are integer-valued, drawn from the middle half of the
/// scale with every level equally represented, so Resnick offsets never push
/// a prediction past the scale ends. With two clusters the second profile
/// mirrors the first. Each profile varies across the `seed_items` entries
/// the session workflow will present first (lowest ids once a panel exists,
/// catalog order otherwise), so seed ratings always carry signal.
SimulatedPopulation make_population(const Catalog& catalog, const RatingScale& scale,
                                    std::size_t seed_items, const PopulationSpec& spec);

enum class Selection { kCollaborativeFiltering, kRandom };

struct StudyResult {
  store::Dataset dataset;
  SatisfactionReport report{};
  /// Recommended items that fall in the participant's latent top-k, over all
  /// recommended items.
  double hit_rate = 0.0;
  std::size_t trials = 0;
  Selection selection = Selection::kCollaborativeFiltering;
};

/// Runs every participant of the population.
///
/// kCollaborativeFiltering drives the full session workflow for each
/// participant against the panel's ratings; hits are scored against the
/// latent top-k of the items the participant had not rated. Participants'
/// seed ratings and sessions are collected into the returned dataset but
/// never serve as neighbors for one another.
/// kRandom replaces the workflow with k uniform draws from the whole
/// catalog scored against the latent top-k of the whole catalog; its
/// dataset holds only the panel.
///
/// Stars are the latent preference mapped onto 1..5. Every trial draws from
/// its own random stream derived from the population seed.
StudyResult simulate_study(const Catalog& catalog, const SessionConfig& config,
                           const SimulatedPopulation& population,
                           Selection selection = Selection::kCollaborativeFiltering);

}  // namespace reqrec::analytics

#endif  // REQREC_ANALYTICS_HPP_
