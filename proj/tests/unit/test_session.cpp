#include <doctest.h>

#include <filesystem>
#include <vector>

#include "reqrec/datastore.hpp"
#include "reqrec/error.hpp"
#include "reqrec/session.hpp"

using namespace reqrec;
using namespace reqrec::workflow;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInternal;
}

Catalog numbered_catalog(int n) {
  Catalog c;
  for (int i = 1; i <= n; ++i) {
    const auto id = "r" + std::to_string(i);
    c.add({RequirementId(id), "item " + id, "", {"no", "yes"}});
  }
  return c;
}

Catalog bundled_catalog() { return store::load_catalog(std::filesystem::path(REQREC_DATA_DIR) / "catalog.csv"); }

RatingMatrix fixture_matrix(const Catalog& catalog) {
  return store::load_ratings(std::filesystem::path(REQREC_DATA_DIR) / "ratings_fixture.csv", catalog).matrix;
}

std::vector<ItemScore> rate_all(const Session& s, int score) {
  std::vector<ItemScore> out;
  for (const auto& id : s.presented_seeds) out.push_back({id, score});
  return out;
}

const Stakeholder kAlice{StakeholderId("alice"), EducationLevel::kMaster};

}  // namespace

TEST_CASE("session state names round-trip") {
  for (auto s : {SessionState::kSeedsPresented, SessionState::kSeedsRated, SessionState::kRecommended,
                 SessionState::kFeedbackCollected}) {
    CHECK(parse_session_state(to_string(s)) == s);
  }
  CHECK(code_of([] { parse_session_state("done"); }) == ErrorCode::kParseError);
}

TEST_CASE("config validation") {
  SessionConfig c;
  CHECK_NOTHROW(c.validate());
  c.k_recommendations = 0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("seed selection") {
  const auto catalog = numbered_catalog(12);
  SUBCASE("empty matrix uses catalog order") {
    RatingMatrix m;
    m.add_requirements(catalog);
    const auto seeds = select_seeds(catalog, m, 3);
    CHECK(seeds == std::vector<RequirementId>{RequirementId("r1"), RequirementId("r2"), RequirementId("r3")});
  }
  SUBCASE("most rated first, ties by id") {
    RatingMatrix m;
    m.add_requirements(catalog);
    const std::pair<const char*, int> raters[] = {{"r7", 10}, {"r2", 8}, {"r9", 8}, {"r1", 5}, {"r12", 7}};
    for (int u = 0; u < 10; ++u) m.add_stakeholder({StakeholderId("u" + std::to_string(u)), {}});
    for (const auto& [item, count] : raters) {
      for (int u = 0; u < count; ++u) m.set(StakeholderId("u" + std::to_string(u)), RequirementId(item), 3);
    }
    // Count-and-sort over the same table.
    std::vector<std::pair<int, std::string>> ranked;
    for (const auto& r : catalog.items()) {
      int count = 0;
      for (const auto& [item, c] : raters) {
        if (r.id.str() == item) count = c;
      }
      ranked.push_back({-count, r.id.str()});
    }
    std::sort(ranked.begin(), ranked.end());
    const auto seeds = select_seeds(catalog, m, 3);
    REQUIRE(seeds.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(seeds[i].str() == ranked[i].second);
    CHECK(seeds == std::vector<RequirementId>{RequirementId("r7"), RequirementId("r2"), RequirementId("r9")});
  }
  SUBCASE("bundled catalog with the dense fixture opens with the first three constructs") {
    const auto bundled = bundled_catalog();
    const auto m = fixture_matrix(bundled);
    const auto seeds = select_seeds(bundled, m, 3);
    REQUIRE(seeds.size() == 3);
    CHECK(bundled.find(seeds[0])->label == "Reliability of the system");
    CHECK(bundled.find(seeds[1])->label == "Professor's information");
    CHECK(bundled.find(seeds[2])->label == "Ability to reserve courses");
  }
  SUBCASE("catalog too small") {
    RatingMatrix m;
    CHECK(code_of([&] { start_session(SessionId("s"), kAlice, {}, numbered_catalog(2), m, 0); }) ==
          ErrorCode::kCatalogTooSmall);
  }
}

TEST_CASE("happy path through every state") {
  const auto catalog = bundled_catalog();
  auto matrix = fixture_matrix(catalog);
  const auto before = matrix.entry_count();
  const SessionConfig config;

  auto s = start_session(SessionId("s1"), kAlice, config, catalog, matrix, 100);
  CHECK(s.state == SessionState::kSeedsPresented);
  CHECK(s.presented_seeds.size() == 3);
  CHECK(s.created_at == 100);
  CHECK(matrix.has_stakeholder(kAlice.id));
  const auto grid = seed_grid(s, catalog, config.scale);
  CHECK(grid.rows().size() == 3);
  CHECK(grid.rows()[0].id == s.presented_seeds[0]);

  submit_seed_ratings(s, matrix, rate_all(s, 5), 200);
  CHECK(s.state == SessionState::kSeedsRated);
  CHECK(matrix.entry_count() == before + 3);
  CHECK(mean_rating(matrix, kAlice.id) == 5.0);
  CHECK(s.updated_at == 200);

  get_recommendations(s, config, matrix, 300);
  CHECK(s.state == SessionState::kRecommended);
  REQUIRE(s.recommendation.has_value());
  CHECK(s.recommendation->items.size() == 5);

  std::vector<ItemStars> stars;
  for (const auto& p : s.recommendation->items) stars.push_back({p.requirement, 5});
  submit_feedback(s, stars, 400);
  CHECK(s.state == SessionState::kFeedbackCollected);
  REQUIRE(s.feedback.size() == 5);
  for (const auto& f : s.feedback) {
    CHECK(f.stars == 5);
    CHECK(f.session_id == s.id);
    CHECK(f.education_level == EducationLevel::kMaster);
  }
}

TEST_CASE("lone target gets mean fallbacks in id order") {
  const auto catalog = numbered_catalog(12);
  RatingMatrix matrix;
  matrix.add_requirements(catalog);
  auto s = start_session(SessionId("s1"), kAlice, {}, catalog, matrix, 0);
  const std::vector<ItemScore> ratings{{s.presented_seeds[0], 2}, {s.presented_seeds[1], 3}, {s.presented_seeds[2], 5}};
  submit_seed_ratings(s, matrix, ratings, 1);
  get_recommendations(s, {}, matrix, 2);
  const auto& items = s.recommendation->items;
  REQUIRE(items.size() == 5);
  // Unrated items are r4..r12; id order puts r10, r11, r12 before r4.
  const char* expected[] = {"r10", "r11", "r12", "r4", "r5"};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(items[i].raw_value == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
    CHECK(items[i].neighbor_support == 0);
    CHECK(items[i].requirement.str() == expected[i]);
  }
}

TEST_CASE("k above the candidate count returns every candidate") {
  const auto catalog = bundled_catalog();
  auto matrix = fixture_matrix(catalog);
  SessionConfig config;
  config.k_recommendations = 20;
  auto s = start_session(SessionId("s1"), kAlice, config, catalog, matrix, 0);
  submit_seed_ratings(s, matrix, rate_all(s, 3), 1);
  get_recommendations(s, config, matrix, 2);
  CHECK(s.recommendation->items.size() == 9);
}

TEST_CASE("failed transitions change nothing") {
  const auto catalog = bundled_catalog();
  auto matrix = fixture_matrix(catalog);
  const SessionConfig config;
  auto s = start_session(SessionId("s1"), kAlice, config, catalog, matrix, 0);
  const auto s0 = s;
  const auto m0 = matrix;

  auto expect_unchanged = [&] {
    CHECK(s == s0);
    CHECK(matrix == m0);
  };

  CHECK(code_of([&] { get_recommendations(s, config, matrix, 5); }) == ErrorCode::kWrongState);
  CHECK(code_of([&] { submit_feedback(s, {}, 5); }) == ErrorCode::kWrongState);
  expect_unchanged();

  auto wrong = rate_all(s, 3);
  wrong[1].requirement_id = RequirementId("r12");
  CHECK(code_of([&] { submit_seed_ratings(s, matrix, wrong, 5); }) == ErrorCode::kWrongItems);
  auto partial = rate_all(s, 3);
  partial.pop_back();
  CHECK(code_of([&] { submit_seed_ratings(s, matrix, partial, 5); }) == ErrorCode::kWrongItems);
  auto repeated = rate_all(s, 3);
  repeated[2] = repeated[0];
  CHECK(code_of([&] { submit_seed_ratings(s, matrix, repeated, 5); }) == ErrorCode::kWrongItems);
  auto out_of_scale = rate_all(s, 3);
  out_of_scale[2].score = 6;
  CHECK(code_of([&] { submit_seed_ratings(s, matrix, out_of_scale, 5); }) == ErrorCode::kOutOfScale);
  expect_unchanged();

  submit_seed_ratings(s, matrix, rate_all(s, 4), 10);
  CHECK(code_of([&] { submit_seed_ratings(s, matrix, rate_all(s, 4), 11); }) == ErrorCode::kWrongState);
  get_recommendations(s, config, matrix, 20);
  const auto s1 = s;
  CHECK(code_of([&] { get_recommendations(s, config, matrix, 21); }) == ErrorCode::kWrongState);

  const auto first = s.recommendation->items[0].requirement;
  const ItemStars not_recommended[] = {{s.presented_seeds[0], 3}};
  CHECK(code_of([&] { submit_feedback(s, not_recommended, 22); }) == ErrorCode::kUnknownRecommendedItem);
  const ItemStars too_many[] = {{first, 6}};
  CHECK(code_of([&] { submit_feedback(s, too_many, 22); }) == ErrorCode::kStarsOutOfRange);
  const ItemStars negative[] = {{first, -1}};
  CHECK(code_of([&] { submit_feedback(s, negative, 22); }) == ErrorCode::kStarsOutOfRange);
  const ItemStars twice[] = {{first, 3}, {first, 4}};
  CHECK(code_of([&] { submit_feedback(s, twice, 22); }) == ErrorCode::kWrongItems);
  CHECK(s == s1);

  const ItemStars partial_feedback[] = {{first, 0}};
  submit_feedback(s, partial_feedback, 30);
  CHECK(s.feedback.size() == 1);
  CHECK(s.feedback[0].no_idea());
  CHECK(code_of([&] { submit_feedback(s, partial_feedback, 31); }) == ErrorCode::kWrongState);
}

TEST_CASE("replaying the same events reproduces the session") {
  const auto catalog = bundled_catalog();
  auto run = [&] {
    auto matrix = fixture_matrix(catalog);
    auto s = start_session(SessionId("s9"), kAlice, {}, catalog, matrix, 1);
    submit_seed_ratings(s, matrix, std::vector<ItemScore>{{s.presented_seeds[0], 1},
                                                          {s.presented_seeds[1], 4},
                                                          {s.presented_seeds[2], 5}},
                        2);
    get_recommendations(s, {}, matrix, 3);
    std::vector<ItemStars> stars;
    int k = 0;
    for (const auto& p : s.recommendation->items) stars.push_back({p.requirement, k++});
    submit_feedback(s, stars, 4);
    return std::pair{s, matrix};
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}
