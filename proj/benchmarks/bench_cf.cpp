#include <filesystem>
#include <random>

#include <benchmark/benchmark.h>

#include "reqrec/analytics.hpp"
#include "reqrec/cf_engine.hpp"
#include "reqrec/datastore.hpp"

using namespace reqrec;

namespace {

const std::filesystem::path kData(REQREC_DATA_DIR);

struct Fixture {
  Catalog catalog = store::load_catalog(kData / "catalog.csv");
  RatingMatrix matrix = store::load_ratings(kData / "ratings_fixture.csv", catalog).matrix;
  StakeholderId target{"bench"};

  Fixture() {
    matrix.add_stakeholder({target, EducationLevel::kUnspecified});
    matrix.set(target, RequirementId("r01"), 5);
    matrix.set(target, RequirementId("r02"), 2);
    matrix.set(target, RequirementId("r03"), 4);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

// Synthetic dense matrix of the requested size.
RatingMatrix dense(std::size_t users, std::size_t items) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> score(1, 5);
  RatingMatrix m;
  for (std::size_t i = 0; i < items; ++i) m.add_requirement(RequirementId("i" + std::to_string(i)));
  for (std::size_t u = 0; u < users; ++u) {
    const StakeholderId id("u" + std::to_string(u));
    m.add_stakeholder({id, EducationLevel::kUnspecified});
    for (std::size_t i = 0; i < items; ++i) m.set(id, RequirementId("i" + std::to_string(i)), score(rng));
  }
  return m;
}

void BM_Recommend50x12(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cf::recommend(f.matrix, f.target, {3, 5, 5}));
  }
}
BENCHMARK(BM_Recommend50x12);

void BM_SimilarityBatch(benchmark::State& state) {
  const auto m = dense(static_cast<std::size_t>(state.range(0)), 12);
  const StakeholderId target("u0");
  for (auto _ : state) {
    benchmark::DoNotOptimize(cf::select_neighbors(m, target, 5));
  }
  state.SetItemsProcessed(state.iterations() * (state.range(0) - 1));
}
BENCHMARK(BM_SimilarityBatch)->Arg(50)->Arg(200)->Arg(1000);

void BM_SimulateStudy(benchmark::State& state) {
  const auto& f = fixture();
  const SessionConfig config;
  const auto pop = analytics::make_population(f.catalog, config.scale, 3, {42, 50, 100, 2, 0.5});
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytics::simulate_study(f.catalog, config, pop));
  }
}
BENCHMARK(BM_SimulateStudy)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
