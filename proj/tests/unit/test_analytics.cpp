#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include <json.hpp>

#include "reqrec/analytics.hpp"
#include "reqrec/datastore.hpp"

using namespace reqrec;
using namespace reqrec::analytics;

namespace {

Catalog bundled_catalog() {
  return store::load_catalog(std::filesystem::path(REQREC_DATA_DIR) / "catalog.csv");
}

FeedbackRecord record(int session, int stars, EducationLevel level) {
  return {SessionId("s" + std::to_string(session)), RequirementId("r1"), stars, level};
}

// One session per participant, five records each.
std::vector<FeedbackRecord> participants(int phd, int master, int bachelor) {
  std::vector<FeedbackRecord> out;
  int session = 0;
  auto add = [&](int count, EducationLevel level) {
    for (int p = 0; p < count; ++p, ++session) {
      for (int item = 0; item < 5; ++item) {
        FeedbackRecord f = record(session, (session + item) % 6, level);
        f.requirement_id = RequirementId("r" + std::to_string(item));
        out.push_back(f);
      }
    }
  };
  add(phd, EducationLevel::kPhD);
  add(master, EducationLevel::kMaster);
  add(bachelor, EducationLevel::kBachelor);
  return out;
}

}  // namespace

TEST_CASE("empty input") {
  const auto r = satisfaction_report({});
  CHECK(r.per_level.size() == 4);
  CHECK(r.overall.participant_count == 0);
  CHECK_FALSE(r.overall.mean_stars.has_value());
  CHECK_FALSE(r.normalized_percentage.has_value());
}

TEST_CASE("two-point mean") {
  const std::vector<FeedbackRecord> f{record(1, 2, EducationLevel::kPhD), record(1, 4, EducationLevel::kPhD)};
  const auto r = satisfaction_report(f);
  CHECK(r.overall.mean_stars == 3.0);
  CHECK(r.normalized_percentage == doctest::Approx(60.0));
  CHECK(r.per_level.at(EducationLevel::kPhD).participant_count == 1);
  CHECK(r.per_level.at(EducationLevel::kPhD).rated_count == 2);
}

TEST_CASE("no-idea records are counted but never averaged") {
  std::vector<FeedbackRecord> f{record(1, 0, EducationLevel::kMaster), record(2, 0, EducationLevel::kBachelor)};
  auto r = satisfaction_report(f);
  for (const auto& [level, summary] : r.per_level) {
    CHECK(summary.rated_count == 0);
    CHECK_FALSE(summary.mean_stars.has_value());
  }
  CHECK(r.overall.no_idea_count == 2);
  CHECK(r.overall.participant_count == 2);

  f.push_back(record(3, 1, EducationLevel::kMaster));
  r = satisfaction_report(f);
  CHECK(r.per_level.at(EducationLevel::kMaster).mean_stars == 1.0);
  CHECK(r.normalized_percentage == doctest::Approx(20.0));
}

TEST_CASE("participant counts per level") {
  const auto f = participants(60, 46, 21);
  const auto r = satisfaction_report(f);
  CHECK(r.per_level.at(EducationLevel::kPhD).participant_count == 60);
  CHECK(r.per_level.at(EducationLevel::kMaster).participant_count == 46);
  CHECK(r.per_level.at(EducationLevel::kBachelor).participant_count == 21);
  CHECK(r.per_level.at(EducationLevel::kUnspecified).participant_count == 0);
  CHECK(r.overall.participant_count == 127);

  std::size_t sum = 0, rated = 0, zero = 0;
  double stars = 0;
  for (const auto& rec : f) {
    if (rec.stars == 0) {
      ++zero;
    } else {
      ++rated;
      stars += rec.stars;
    }
  }
  for (const auto& [level, s] : r.per_level) sum += s.participant_count;
  CHECK(sum == 127);
  CHECK(r.overall.rated_count == rated);
  CHECK(r.overall.no_idea_count == zero);
  CHECK(*r.overall.mean_stars == doctest::Approx(stars / static_cast<double>(rated)).epsilon(1e-12));
  CHECK(*r.normalized_percentage >= 20.0);
  CHECK(*r.normalized_percentage <= 100.0);
}

TEST_CASE("order of records does not matter") {
  auto f = participants(5, 4, 3);
  const auto base = satisfaction_report(f);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(f.begin(), f.end(), rng);
    const auto r = satisfaction_report(f);
    CHECK(r.overall.participant_count == base.overall.participant_count);
    CHECK(*r.overall.mean_stars == doctest::Approx(*base.overall.mean_stars).epsilon(1e-12));
    for (const auto& [level, s] : base.per_level) {
      CHECK(r.per_level.at(level).rated_count == s.rated_count);
      CHECK(r.per_level.at(level).participant_count == s.participant_count);
    }
  }
}

TEST_CASE("report renderings") {
  const auto r = satisfaction_report(participants(2, 1, 0));
  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j.at("overall").at("participant_count") == 3);
  CHECK(j.at("per_level").contains("PhD"));
  CHECK(j.at("per_level").at("Bachelor").at("mean_stars").is_null());
  const auto table = report_table(r);
  CHECK(table.find("PhD") != std::string::npos);
  CHECK(table.find("overall") != std::string::npos);
}

TEST_CASE("population is a function of its seed") {
  const auto catalog = bundled_catalog();
  const PopulationSpec spec{42, 10, 20, 2, 0.5};
  const auto a = make_population(catalog, {}, 3, spec);
  const auto b = make_population(catalog, {}, 3, spec);
  CHECK(a == b);
  CHECK(a.size() == 30);
  CHECK(a.participants() == 20);
  auto other = spec;
  other.seed = 43;
  CHECK_FALSE(make_population(catalog, {}, 3, other) == a);
}

TEST_CASE("simulated study") {
  const auto catalog = bundled_catalog();
  const SessionConfig config;

  SUBCASE("one shared profile without noise is predicted perfectly") {
    const auto pop = make_population(catalog, config.scale, 3, {42, 20, 30, 1, 0.0});
    const auto res = simulate_study(catalog, config, pop);
    CHECK(res.hit_rate == 1.0);
    CHECK(res.trials == 30);
  }
  SUBCASE("two clusters without noise") {
    const auto pop = make_population(catalog, config.scale, 3, {42, 50, 200, 2, 0.0});
    const auto cf = simulate_study(catalog, config, pop);
    const auto random = simulate_study(catalog, config, pop, Selection::kRandom);
    CHECK(cf.hit_rate == 1.0);
    CHECK(cf.hit_rate > random.hit_rate);
    CHECK(cf.report.overall.participant_count == 200);
    CHECK(cf.dataset.sessions.size() == 200);
    CHECK_NOTHROW(cf.dataset.validate());
    for (const auto& s : cf.dataset.sessions) CHECK(s.state == SessionState::kFeedbackCollected);
  }
  SUBCASE("random selection hits k out of twelve on average") {
    const auto pop = make_population(catalog, config.scale, 3, {7, 0, 10000, 2, 0.0});
    const auto random = simulate_study(catalog, config, pop, Selection::kRandom);
    CHECK(random.trials == 10000);
    CHECK(std::abs(random.hit_rate - 5.0 / 12.0) <= 0.02);
  }
  SUBCASE("reports are repeatable") {
    const auto pop = make_population(catalog, config.scale, 3, {42, 50, 100, 2, 0.7});
    const auto a = simulate_study(catalog, config, pop);
    const auto b = simulate_study(catalog, config, pop);
    CHECK(report_json(a.report) == report_json(b.report));
    CHECK(a.hit_rate == b.hit_rate);
    CHECK(a.dataset == b.dataset);
  }
}
