#include <doctest.h>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "reqrec/datastore.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = REQREC_CLI;
const fs::path kData(REQREC_DATA_DIR);

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const auto cmd = kCli + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

double field_value(const std::string& line, const std::string& key) {
  const auto at = line.find(key + "=");
  REQUIRE(at != std::string::npos);
  return std::stod(line.substr(at + key.size() + 1));
}

double hit_rate(const std::string& out) {
  const auto j = json::parse(out);
  return j.at("hit_rate").get<double>();
}

const std::string kRatings = "--catalog " + (kData / "catalog.csv").string() + " --ratings " +
                             (kData / "ratings_fixture.csv").string();

}  // namespace

TEST_CASE("recommend prints five ranked lines") {
  const auto args = "recommend " + kRatings + " --stakeholder newcomer --rate r01=5 --rate r02=1 --rate r03=4";
  const auto a = run(args + " --n 3 --m 5 --k 5");
  REQUIRE(a.status == 0);
  const auto out = lines(a.out);
  REQUIRE(out.size() == 5);
  double previous = 1e9;
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].rfind(std::to_string(i + 1) + "\t", 0) == 0);
    const double clamped = field_value(out[i], "clamped");
    CHECK(clamped <= previous);
    CHECK(clamped >= 1.0);
    CHECK(clamped <= 5.0);
    previous = clamped;
    for (const char* seed : {"\tr01\t", "\tr02\t", "\tr03\t"}) CHECK(out[i].find(seed) == std::string::npos);
  }
  CHECK(run(args).out == a.out);
  CHECK(run(args + " --form paper-literal").status == 0);
}

TEST_CASE("recommend failures exit non-zero") {
  const auto zero = run("recommend " + kRatings + " --stakeholder u01 --k 0");
  CHECK(zero.status != 0);
  const auto unknown = run("recommend " + kRatings + " --stakeholder nobody");
  CHECK(unknown.status != 0);
  CHECK(unknown.out.find("unknown_stakeholder") != std::string::npos);
  const auto bad_rate = run("recommend " + kRatings + " --stakeholder x --rate r01=9");
  CHECK(bad_rate.status != 0);
  CHECK(bad_rate.out.find("out_of_scale") != std::string::npos);
  const auto bad_form = run("recommend " + kRatings + " --stakeholder u01 --form literal");
  CHECK(bad_form.status != 0);
  const auto missing = run("recommend --ratings /nonexistent.csv --stakeholder u01");
  CHECK(missing.status != 0);
  CHECK(missing.out.find("io_error") != std::string::npos);
}

TEST_CASE("simulate") {
  const auto catalog = " --catalog " + (kData / "catalog.csv").string();
  const auto a = run("simulate" + catalog + " --seed 42 --trials 100");
  REQUIRE(a.status == 0);
  CHECK(run("simulate" + catalog + " --seed 42 --trials 100").out == a.out);
  CHECK(a.out.find("random baseline") != std::string::npos);
  CHECK(a.out.find("57%") != std::string::npos);

  const auto one = run("simulate" + catalog + " --noise 0 --clusters 1 --json");
  REQUIRE(one.status == 0);
  CHECK(hit_rate(one.out) == 1.0);

  const auto random = run("simulate" + catalog + " --baseline random --k 5 --trials 10000 --json");
  REQUIRE(random.status == 0);
  CHECK(std::abs(hit_rate(random.out) - 5.0 / 12.0) <= 0.02);
  CHECK(json::parse(random.out).at("selection") == "random");
}

TEST_CASE("fixture subcommand regenerates the committed file") {
  const auto out = fs::temp_directory_path() / "reqrec_cli_fixture.csv";
  REQUIRE(run("fixture --catalog " + (kData / "catalog.csv").string() + " --out " + out.string()).status == 0);
  const auto catalog = reqrec::store::load_catalog(kData / "catalog.csv");
  CHECK(reqrec::store::load_ratings(out, catalog).matrix ==
        reqrec::store::load_ratings(kData / "ratings_fixture.csv", catalog).matrix);
}

TEST_CASE("serve persists on shutdown and report reads the store") {
  const auto store = fs::temp_directory_path() / "reqrec_cli_serve.json";
  fs::remove(store);

  int pipe_fd[2];
  REQUIRE(::pipe(pipe_fd) == 0);
  const pid_t child = ::fork();
  REQUIRE(child >= 0);
  if (child == 0) {
    ::dup2(pipe_fd[1], STDOUT_FILENO);
    ::close(pipe_fd[0]);
    const std::string catalog = (kData / "catalog.csv").string();
    const std::string ratings = (kData / "ratings_fixture.csv").string();
    ::execl(kCli.c_str(), kCli.c_str(), "serve", "--store", store.c_str(), "--catalog", catalog.c_str(),
            "--ratings", ratings.c_str(), "--port", "0", static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(pipe_fd[1]);
  std::string banner;
  char ch;
  while (::read(pipe_fd[0], &ch, 1) == 1 && ch != '\n') banner += ch;
  const auto colon = banner.rfind(':');
  REQUIRE(colon != std::string::npos);
  const int port = std::stoi(banner.substr(colon + 1));

  httplib::Client client("127.0.0.1", port);
  auto res = client.Post("/sessions", R"({"stakeholder_id": "cli", "education_level": "PhD"})", "application/json");
  REQUIRE(res);
  const auto s = json::parse(res->body);
  const auto id = s.at("id").get<std::string>();
  json ratings = json::array();
  for (const auto& row : s.at("presented_seeds")) ratings.push_back({{"requirement_id", row.at("requirement_id")}, {"score", 4}});
  REQUIRE(client.Post("/sessions/" + id + "/ratings", json{{"ratings", ratings}}.dump(), "application/json"));
  res = client.Post("/sessions/" + id + "/recommendations", "{}", "application/json");
  REQUIRE(res);
  const auto recommended = json::parse(res->body);
  json feedback = json::array();
  for (const auto& item : recommended.at("recommendation").at("items")) {
    feedback.push_back({{"requirement_id", item.at("requirement_id")}, {"stars", 5}});
  }
  REQUIRE(client.Post("/sessions/" + id + "/feedback", json{{"feedback", feedback}}.dump(), "application/json"));

  ::kill(child, SIGTERM);
  int status = 0;
  ::waitpid(child, &status, 0);
  ::close(pipe_fd[0]);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);

  const auto dataset = reqrec::store::load_state(store);
  REQUIRE(dataset.sessions.size() == 1);
  CHECK(dataset.sessions[0].state == reqrec::SessionState::kFeedbackCollected);

  const auto report = run("report --store " + store.string() + " --json");
  REQUIRE(report.status == 0);
  const auto j = json::parse(report.out);
  CHECK(j.at("per_level").at("PhD").at("participant_count") == 1);
  CHECK(j.at("overall").at("mean_stars") == 5.0);
  CHECK(run("report --store " + store.string()).out.find("PhD") != std::string::npos);
}
