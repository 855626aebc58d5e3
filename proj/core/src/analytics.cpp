#include "reqrec/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "reqrec/error.hpp"

namespace reqrec::analytics {

using nlohmann::json;

namespace {

constexpr EducationLevel kAllLevels[] = {EducationLevel::kPhD, EducationLevel::kMaster,
                                         EducationLevel::kBachelor, EducationLevel::kUnspecified};

// Stream tags keep per-purpose random streams apart for the same index.
enum Stream : std::uint32_t { kProfiles = 1, kPanel = 2, kTrial = 3 };

std::mt19937_64 stream(std::uint64_t seed, Stream tag, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::string numbered(const char* prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
  return buf;
}

int observe(double latent, double noise, const RatingScale& scale, std::mt19937_64& rng) {
  double value = latent;
  if (noise > 0.0) value += std::normal_distribution<double>(0.0, noise)(rng);
  return static_cast<int>(scale.clamp(std::round(value)));
}

int to_stars(double latent, const RatingScale& scale) {
  const double unit = (latent - scale.min) / static_cast<double>(scale.max - scale.min);
  const double stars = std::round(1.0 + unit * (kMaxStars - 1));
  return static_cast<int>(std::clamp(stars, 1.0, static_cast<double>(kMaxStars)));
}

// Catalog positions ordered by latent preference, highest first, ties by id.
std::vector<std::size_t> latent_top(const Catalog& catalog, const std::vector<double>& profile,
                                    std::vector<std::size_t> pool, std::size_t k) {
  std::sort(pool.begin(), pool.end(), [&](std::size_t x, std::size_t y) {
    if (profile[x] != profile[y]) return profile[x] > profile[y];
    return catalog.items()[x].id < catalog.items()[y].id;
  });
  pool.resize(std::min(k, pool.size()));
  return pool;
}

std::vector<std::size_t> anchor_positions(const Catalog& catalog, std::size_t seed_items,
                                          bool by_id) {
  std::vector<std::size_t> order(catalog.size());
  std::iota(order.begin(), order.end(), 0);
  if (by_id) {
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return catalog.items()[x].id < catalog.items()[y].id;
    });
  }
  order.resize(std::min(seed_items, order.size()));
  return order;
}

}  // namespace

SatisfactionReport satisfaction_report(std::span<const FeedbackRecord> feedback) {
  SatisfactionReport report;
  struct Tally {
    std::set<SessionId> sessions;
    double stars = 0.0;
  };
  std::map<EducationLevel, Tally> tallies;
  Tally overall;
  for (auto level : kAllLevels) report.per_level[level] = {};

  for (const auto& record : feedback) {
    auto& summary = report.per_level[record.education_level];
    auto& tally = tallies[record.education_level];
    tally.sessions.insert(record.session_id);
    overall.sessions.insert(record.session_id);
    if (record.no_idea()) {
      ++summary.no_idea_count;
      ++report.overall.no_idea_count;
    } else {
      ++summary.rated_count;
      ++report.overall.rated_count;
      tally.stars += record.stars;
      overall.stars += record.stars;
    }
  }
  // Star sums are integers, so the means do not depend on input order.
  for (auto& [level, summary] : report.per_level) {
    const auto& tally = tallies[level];
    summary.participant_count = tally.sessions.size();
    if (summary.rated_count > 0) summary.mean_stars = tally.stars / summary.rated_count;
  }
  report.overall.participant_count = overall.sessions.size();
  if (report.overall.rated_count > 0) {
    report.overall.mean_stars = overall.stars / report.overall.rated_count;
    report.normalized_percentage = *report.overall.mean_stars / kMaxStars * 100.0;
  }
  return report;
}

std::string report_json(const SatisfactionReport& report) {
  auto summary_json = [](const LevelSummary& s) {
    return json{{"participant_count", s.participant_count},
                {"mean_stars", s.mean_stars ? json(*s.mean_stars) : json(nullptr)},
                {"rated_count", s.rated_count},
                {"no_idea_count", s.no_idea_count}};
  };
  json levels = json::object();
  for (const auto& [level, summary] : report.per_level) {
    levels[std::string(to_string(level))] = summary_json(summary);
  }
  json doc = {{"per_level", std::move(levels)},
              {"overall", summary_json(report.overall)},
              {"normalized_percentage",
               report.normalized_percentage ? json(*report.normalized_percentage) : json(nullptr)}};
  return doc.dump(2);
}

std::string report_table(const SatisfactionReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %12s %10s %8s %8s\n", "level", "participants",
                "mean", "rated", "no idea");
  out << line;
  auto row = [&](std::string_view name, const LevelSummary& s) {
    char mean[32] = "-";
    if (s.mean_stars) std::snprintf(mean, sizeof mean, "%.3f", *s.mean_stars);
    std::snprintf(line, sizeof line, "%-12.*s %12zu %10s %8zu %8zu\n", static_cast<int>(name.size()),
                  name.data(), s.participant_count, mean, s.rated_count, s.no_idea_count);
    out << line;
  };
  for (const auto& [level, summary] : report.per_level) row(to_string(level), summary);
  row("overall", report.overall);
  if (report.normalized_percentage) {
    std::snprintf(line, sizeof line, "satisfaction: %.1f%%\n", *report.normalized_percentage);
  } else {
    std::snprintf(line, sizeof line, "satisfaction: -\n");
  }
  out << line;
  return out.str();
}

SimulatedPopulation make_population(const Catalog& catalog, const RatingScale& scale,
                                    std::size_t seed_items, const PopulationSpec& spec) {
  scale.validate();
  if (catalog.empty()) throw Error(ErrorCode::kInvalidArgument, "population needs a non-empty catalog");
  if (spec.clusters == 0) throw Error(ErrorCode::kInvalidArgument, "clusters must be >= 1");
  if (spec.noise < 0.0) throw Error(ErrorCode::kInvalidArgument, "noise must be >= 0");
  if (spec.panel + spec.participants == 0) {
    throw Error(ErrorCode::kInvalidArgument, "population must not be empty");
  }

  const double span = scale.max - scale.min;
  int lo = static_cast<int>(std::ceil(scale.min + span / 4.0));
  int hi = static_cast<int>(std::floor(scale.max - span / 4.0));
  if (lo >= hi) {
    lo = scale.min;
    hi = scale.max;
  }
  const int levels = hi - lo + 1;
  const auto n = catalog.size();
  const auto anchors = anchor_positions(catalog, seed_items, spec.panel > 0);

  auto rng = stream(spec.seed, kProfiles, 0);
  auto varies_on_anchors = [&](const std::vector<double>& p) {
    if (anchors.size() < 2) return true;
    return std::any_of(anchors.begin(), anchors.end(),
                       [&](std::size_t i) { return p[i] != p[anchors.front()]; });
  };
  auto draw_profile = [&] {
    std::vector<double> profile(n);
    for (std::size_t i = 0; i < n; ++i) profile[i] = lo + static_cast<int>(i % levels);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::shuffle(profile.begin(), profile.end(), rng);
      if (varies_on_anchors(profile)) break;
    }
    return profile;
  };

  std::vector<std::vector<double>> centers;
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    if (c == 1 && spec.clusters == 2) {
      auto mirrored = centers.front();
      for (auto& v : mirrored) v = lo + hi - v;
      centers.push_back(std::move(mirrored));
    } else {
      centers.push_back(draw_profile());
    }
  }

  SimulatedPopulation population{.seed = spec.seed, .panel = spec.panel, .noise_level = spec.noise};
  std::discrete_distribution<int> level_pick({60.0, 46.0, 21.0});
  constexpr EducationLevel kStudyLevels[] = {EducationLevel::kPhD, EducationLevel::kMaster,
                                             EducationLevel::kBachelor};
  const auto total = spec.panel + spec.participants;
  for (std::size_t k = 0; k < total; ++k) {
    population.cluster_of.push_back(k % spec.clusters);
    population.profiles.push_back(centers[k % spec.clusters]);
    population.education.push_back(kStudyLevels[level_pick(rng)]);
  }
  return population;
}

StudyResult simulate_study(const Catalog& catalog, const SessionConfig& config,
                           const SimulatedPopulation& population, Selection selection) {
  config.validate();
  if (catalog.empty()) throw Error(ErrorCode::kInvalidArgument, "simulation needs a non-empty catalog");
  if (population.size() == 0) throw Error(ErrorCode::kInvalidArgument, "simulation needs a population");
  for (const auto& profile : population.profiles) {
    if (profile.size() != catalog.size()) {
      throw Error(ErrorCode::kInvalidArgument, "population profiles do not match the catalog size");
    }
  }

  const auto& scale = config.scale;
  StudyResult result{.dataset = store::Dataset::over(catalog, scale), .selection = selection};
  auto& dataset = result.dataset;

  for (std::size_t k = 0; k < population.panel; ++k) {
    const Stakeholder who{StakeholderId(numbered("panel-", k + 1, 4)), population.education[k]};
    dataset.matrix.add_stakeholder(who);
    auto rng = stream(population.seed, kPanel, k);
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      dataset.matrix.set(who.id, catalog.items()[i].id,
                         observe(population.profiles[k][i], population.noise_level, scale, rng));
    }
  }

  const RatingMatrix panel_matrix = dataset.matrix;
  std::size_t hits = 0;
  std::size_t recommended = 0;
  std::vector<FeedbackRecord> random_feedback;
  std::vector<std::size_t> all_positions(catalog.size());
  std::iota(all_positions.begin(), all_positions.end(), 0);
  std::map<RequirementId, std::size_t> position_of;
  for (std::size_t i = 0; i < catalog.size(); ++i) position_of[catalog.items()[i].id] = i;

  for (std::size_t t = 0; t < population.participants(); ++t) {
    const auto k = population.panel + t;
    const auto& profile = population.profiles[k];
    auto rng = stream(population.seed, kTrial, t);
    const auto want = static_cast<std::size_t>(config.k_recommendations);

    if (selection == Selection::kRandom) {
      auto picks = all_positions;
      std::shuffle(picks.begin(), picks.end(), rng);
      picks.resize(std::min(want, picks.size()));
      const auto top = latent_top(catalog, profile, all_positions, picks.size());
      const SessionId trial(numbered("trial-", t + 1, 5));
      for (auto pos : picks) {
        hits += std::count(top.begin(), top.end(), pos);
        random_feedback.push_back({trial, catalog.items()[pos].id, to_stars(profile[pos], scale),
                                   population.education[k]});
      }
      recommended += picks.size();
      continue;
    }

    // Each participant is matched against the panel only; their own ratings
    // land in the returned dataset but stay invisible to later participants.
    const Timestamp now = static_cast<Timestamp>(t);
    const Stakeholder who{StakeholderId(numbered("part-", t + 1, 5)), population.education[k]};
    RatingMatrix matrix = panel_matrix;
    auto session = workflow::start_session(SessionId(numbered("sim-", t + 1, 5)), who, config,
                                           catalog, matrix, now);
    std::vector<ItemScore> ratings;
    for (const auto& seed : session.presented_seeds) {
      ratings.push_back({seed, observe(profile[position_of.at(seed)], population.noise_level, scale, rng)});
    }
    workflow::submit_seed_ratings(session, matrix, ratings, now);
    dataset.matrix.add_stakeholder(who);
    for (const auto& r : ratings) dataset.matrix.set(who.id, r.requirement_id, r.score);

    std::vector<std::size_t> pool;
    const auto& rated = matrix.row(who.id);
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      if (!rated.contains(catalog.items()[i].id)) pool.push_back(i);
    }
    workflow::get_recommendations(session, config, matrix, now);
    const auto& items = session.recommendation->items;
    const auto top = latent_top(catalog, profile, pool, items.size());
    std::vector<ItemStars> stars;
    for (const auto& p : items) {
      const auto pos = position_of.at(p.requirement);
      hits += std::count(top.begin(), top.end(), pos);
      stars.push_back({p.requirement, to_stars(profile[pos], scale)});
    }
    recommended += items.size();
    workflow::submit_feedback(session, stars, now);
    dataset.sessions.push_back(std::move(session));
  }

  result.trials = population.participants();
  result.hit_rate = recommended == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(recommended);
  if (selection == Selection::kRandom) {
    result.report = satisfaction_report(random_feedback);
  } else {
    const auto feedback = dataset.feedback();
    result.report = satisfaction_report(feedback);
  }
  return result;
}

}  // namespace reqrec::analytics
