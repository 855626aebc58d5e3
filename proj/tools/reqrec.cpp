// reqrec command-line driver: serve the JSON API, run one-off
// recommendations, simulate studies and print satisfaction reports.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "reqrec/analytics.hpp"
#include "reqrec/cf_engine.hpp"
#include "reqrec/datastore.hpp"
#include "reqrec/error.hpp"
#include "reqrec/service.hpp"

namespace fs = std::filesystem;
using namespace reqrec;

namespace {

#ifndef REQREC_DEFAULT_CATALOG
#define REQREC_DEFAULT_CATALOG "data/catalog.csv"
#endif

struct PipelineFlags {
  int n = 3;
  int m = 5;
  int k = 5;
  std::string form = "standard";

  SessionConfig config(RatingScale scale = {}) const {
    SessionConfig c{n, m, k, scale, cf::parse_prediction_form(form)};
    c.validate();
    return c;
  }
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& flags) {
  cmd->add_option("--n", flags.n, "Seed requirements presented (N)")->check(CLI::PositiveNumber);
  cmd->add_option("--m", flags.m, "Neighbors consulted (M)")->check(CLI::PositiveNumber);
  cmd->add_option("--k", flags.k, "Recommendations returned (K)")->check(CLI::PositiveNumber);
  cmd->add_option("--form", flags.form, "Prediction form")
      ->check(CLI::IsMember({"standard", "paper-literal"}));
}

int fail(const Error& e) {
  std::cerr << "error: " << code_name(e.code()) << ": " << e.what() << "\n";
  return 1;
}

// --- recommend ------------------------------------------------------------

struct RecommendFlags {
  std::string catalog = REQREC_DEFAULT_CATALOG;
  std::string ratings;
  std::string stakeholder;
  std::string education = "Unspecified";
  std::vector<std::string> rates;
  PipelineFlags pipeline;
};

ItemScore parse_rate(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw Error(ErrorCode::kInvalidArgument, "--rate expects REQUIREMENT=SCORE, got '" + text + "'");
  }
  try {
    std::size_t used = 0;
    const int score = std::stoi(text.substr(eq + 1), &used);
    if (used != text.size() - eq - 1) throw std::invalid_argument("trailing");
    return {RequirementId(text.substr(0, eq)), score};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidArgument, "--rate score in '" + text + "' is not an integer");
  }
}

int run_recommend(const RecommendFlags& flags) {
  const auto config = flags.pipeline.config();
  const auto catalog = store::load_catalog(fs::path(flags.catalog));
  auto matrix = store::load_ratings(fs::path(flags.ratings), catalog, config.scale).matrix;
  const StakeholderId target(flags.stakeholder);
  if (!matrix.has_stakeholder(target)) {
    if (flags.rates.empty()) {
      throw Error(ErrorCode::kUnknownStakeholder,
                  "stakeholder " + target.str() + " is not in the ratings; pass --rate to add one");
    }
    matrix.add_stakeholder({target, parse_education_level(flags.education)});
  }
  for (const auto& text : flags.rates) {
    const auto rate = parse_rate(text);
    matrix.set(target, rate.requirement_id, rate.score);
  }

  const auto rec = cf::recommend(matrix, target, config.params(), config.prediction_form);
  if (rec.items.empty()) std::cerr << "note: " << target << " has rated every requirement\n";
  for (std::size_t i = 0; i < rec.items.size(); ++i) {
    const auto& p = rec.items[i];
    const auto* r = catalog.find(p.requirement);
    std::printf("%zu\t%s\traw=%.6f\tclamped=%.6f\tsupport=%zu\t%s\n", i + 1, p.requirement.str().c_str(),
                p.raw_value, p.clamped_value, p.neighbor_support, r ? r->label.c_str() : "");
  }
  return 0;
}

// --- simulate -------------------------------------------------------------

struct SimulateFlags {
  std::string catalog = REQREC_DEFAULT_CATALOG;
  std::uint64_t seed = 42;
  std::size_t trials = 100;
  std::size_t panel = 50;
  std::size_t clusters = 2;
  double noise = 0.0;
  std::string baseline = "none";
  bool json = false;
  PipelineFlags pipeline;
};

int run_simulate(const SimulateFlags& flags) {
  const auto config = flags.pipeline.config();
  const auto catalog = store::load_catalog(fs::path(flags.catalog));
  const analytics::PopulationSpec spec{flags.seed, flags.panel, flags.trials, flags.clusters, flags.noise};
  const auto population = analytics::make_population(catalog, config.scale,
                                                     static_cast<std::size_t>(config.n_seeds), spec);

  const auto random = analytics::simulate_study(catalog, config, population, analytics::Selection::kRandom);
  std::optional<analytics::StudyResult> cf;
  if (flags.baseline != "random") {
    cf = analytics::simulate_study(catalog, config, population,
                                   analytics::Selection::kCollaborativeFiltering);
  }
  const auto& headline = cf ? *cf : random;

  if (flags.json) {
    std::printf("{\"selection\": \"%s\", \"trials\": %zu, \"hit_rate\": %.6f, \"random_hit_rate\": %.6f, "
                "\"report\": %s}\n",
                cf ? "cf" : "random", headline.trials, headline.hit_rate, random.hit_rate,
                analytics::report_json(headline.report).c_str());
    return 0;
  }
  std::printf("selection: %s\n", cf ? "collaborative filtering" : "uniform random");
  std::printf("trials: %zu  panel: %zu  clusters: %zu  noise: %.3f  seed: %llu\n", headline.trials,
              flags.panel, flags.clusters, flags.noise, static_cast<unsigned long long>(flags.seed));
  std::printf("N=%d M=%d K=%d form=%s\n\n", config.n_seeds, config.m_neighbors, config.k_recommendations,
              std::string(cf::to_string(config.prediction_form)).c_str());
  std::fputs(analytics::report_table(headline.report).c_str(), stdout);
  std::printf("\nhit rate (simulated):        %.6f\n", headline.hit_rate);
  std::printf("hit rate (random baseline):  %.6f\n", random.hit_rate);
  std::printf("reference field study (human participants, not reproduced): about 57%% satisfaction\n");
  return 0;
}

// --- report ---------------------------------------------------------------

int run_report(const std::string& store_path, bool json) {
  const auto dataset = store::load_state(fs::path(store_path));
  const auto feedback = dataset.feedback();
  const auto report = analytics::satisfaction_report(feedback);
  if (json) {
    std::printf("%s\n", analytics::report_json(report).c_str());
  } else {
    std::fputs(analytics::report_table(report).c_str(), stdout);
  }
  return 0;
}

// --- serve ----------------------------------------------------------------

struct ServeFlags {
  std::string store;
  std::string catalog = REQREC_DEFAULT_CATALOG;
  std::string ratings;
  std::string host = "127.0.0.1";
  int port = 8080;
  PipelineFlags pipeline;
};

int run_serve(const ServeFlags& flags) {
  const auto config = flags.pipeline.config();
  Catalog catalog;
  std::optional<RatingMatrix> initial;
  if (!fs::exists(flags.store)) {
    catalog = store::load_catalog(fs::path(flags.catalog));
    if (!flags.ratings.empty()) {
      initial = store::load_ratings(fs::path(flags.ratings), catalog, config.scale).matrix;
    }
  }
  auto service = service::Service::open(flags.store, config, catalog, initial ? &*initial : nullptr);
  service::HttpServer server(*service);
  const int port = server.bind(flags.host, flags.port);

  // Shutdown signals are taken synchronously by a waiter thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
  });

  std::printf("listening on http://%s:%d (store %s)\n", flags.host.c_str(), port, flags.store.c_str());
  std::fflush(stdout);
  server.listen();
  service->persist();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  std::printf("state saved to %s\n", flags.store.c_str());
  return 0;
}

// --- fixture --------------------------------------------------------------

int run_fixture(const std::string& catalog_path, const store::FixtureSpec& spec, const std::string& out_path) {
  const auto catalog = store::load_catalog(fs::path(catalog_path));
  const auto rows = store::generate_fixture(catalog, spec);
  if (out_path.empty() || out_path == "-") {
    store::write_ratings(std::cout, rows);
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
  store::write_ratings(out, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Requirement recommendation by collaborative filtering over a repertory grid"};
  app.require_subcommand(1);

  ServeFlags serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API");
  serve_cmd->add_option("--store", serve.store, "State store file (created when missing)")->required();
  serve_cmd->add_option("--catalog", serve.catalog, "Catalog CSV for a new store");
  serve_cmd->add_option("--ratings", serve.ratings, "Initial ratings CSV for a new store");
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  add_pipeline_flags(serve_cmd, serve.pipeline);

  RecommendFlags recommend;
  auto* recommend_cmd = app.add_subcommand("recommend", "Recommend requirements for one stakeholder");
  recommend_cmd->add_option("--catalog", recommend.catalog, "Catalog CSV");
  recommend_cmd->add_option("--ratings", recommend.ratings, "Ratings CSV")->required();
  recommend_cmd->add_option("--stakeholder", recommend.stakeholder, "Target stakeholder id")->required();
  recommend_cmd->add_option("--rate", recommend.rates,
                            "Extra rating REQUIREMENT=SCORE for the target (repeatable)");
  recommend_cmd->add_option("--education", recommend.education, "Education level of a new target");
  add_pipeline_flags(recommend_cmd, recommend.pipeline);

  SimulateFlags simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a study on a synthetic population");
  simulate_cmd->add_option("--catalog", simulate.catalog, "Catalog CSV");
  simulate_cmd->add_option("--seed", simulate.seed, "Random seed");
  simulate_cmd->add_option("--trials", simulate.trials, "Simulated participants")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--panel", simulate.panel, "Stakeholders rating the full catalog up front");
  simulate_cmd->add_option("--clusters", simulate.clusters, "Preference clusters")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--noise", simulate.noise, "Rating noise (std. dev.)")->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--baseline", simulate.baseline, "Report only this baseline")
      ->check(CLI::IsMember({"none", "random"}));
  simulate_cmd->add_flag("--json", simulate.json, "Machine-readable output");
  add_pipeline_flags(simulate_cmd, simulate.pipeline);

  std::string report_store;
  bool report_json = false;
  auto* report_cmd = app.add_subcommand("report", "Satisfaction report from a state store");
  report_cmd->add_option("--store", report_store, "State store file")->required();
  report_cmd->add_flag("--json", report_json, "Machine-readable output");

  std::string fixture_catalog = REQREC_DEFAULT_CATALOG;
  std::string fixture_out;
  store::FixtureSpec fixture;
  auto* fixture_cmd = app.add_subcommand("fixture", "Write a seeded synthetic ratings CSV");
  fixture_cmd->add_option("--catalog", fixture_catalog, "Catalog CSV");
  fixture_cmd->add_option("--seed", fixture.seed, "Random seed");
  fixture_cmd->add_option("--stakeholders", fixture.stakeholders, "Stakeholder count");
  fixture_cmd->add_option("--density", fixture.density, "Fraction of cells rated")->check(CLI::Range(0.0, 1.0));
  fixture_cmd->add_option("--out", fixture_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return run_serve(serve);
    if (*recommend_cmd) return run_recommend(recommend);
    if (*simulate_cmd) return run_simulate(simulate);
    if (*report_cmd) return run_report(report_store, report_json);
    if (*fixture_cmd) return run_fixture(fixture_catalog, fixture, fixture_out);
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(Error(ErrorCode::kInternal, e.what()));
  }
  return 0;
}
