#include "reqrec/service.hpp"

#include <atomic>
#include <cstdio>
#include <limits>
#include <mutex>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "reqrec/analytics.hpp"

namespace reqrec::service {

using nlohmann::json;

namespace {

Response json_response(int status, const json& body) { return {status, body.dump()}; }

Response error_response(ErrorCode code, const std::string& message, json details = nullptr) {
  return json_response(http_status(code),
                       {{"error", {{"code", std::string(code_name(code))},
                                   {"message", message},
                                   {"details", std::move(details)}}}});
}

std::vector<std::string_view> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    if (path.front() == '/') {
      path.remove_prefix(1);
      continue;
    }
    const auto end = path.find('/');
    parts.push_back(path.substr(0, end));
    if (end == std::string_view::npos) break;
    path.remove_prefix(end);
  }
  return parts;
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::kParseError, "request body is not valid JSON");
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "request body must be a JSON object");
  return doc;
}

const json& member(const json& object, const char* name) {
  if (!object.is_object() || !object.contains(name)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("missing field '") + name + "'");
  }
  return object.at(name);
}

std::string string_member(const json& object, const char* name) {
  const auto& value = member(object, name);
  if (!value.is_string() || value.get_ref<const std::string&>().empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + name + "' must be a non-empty string");
  }
  return value.get<std::string>();
}

int int_member(const json& object, const char* name) {
  const auto& value = member(object, name);
  if (!value.is_number_integer()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + name + "' must be an integer");
  }
  const auto wide = value.get<long long>();
  if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + name + "' is out of range");
  }
  return static_cast<int>(wide);
}

const json& array_member(const json& object, const char* name) {
  const auto& value = member(object, name);
  if (!value.is_array()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + name + "' must be an array");
  }
  return value;
}

json requirement_json(const Requirement& r) {
  return {{"id", r.id.str()},
          {"label", r.label},
          {"description", r.description},
          {"left_pole", r.construct_pair.left_pole},
          {"right_pole", r.construct_pair.right_pole}};
}

json session_json(const Session& s, const store::Dataset& d) {
  json grid = json::array();
  for (const auto& id : s.presented_seeds) {
    json row = {{"requirement_id", id.str()}, {"score", nullptr}};
    if (const auto* r = d.catalog.find(id)) {
      row["label"] = r->label;
      row["left_pole"] = r->construct_pair.left_pole;
      row["right_pole"] = r->construct_pair.right_pole;
    }
    if (s.state != SessionState::kSeedsPresented) {
      if (auto score = d.matrix.get(s.stakeholder.id, id)) row["score"] = *score;
    }
    grid.push_back(std::move(row));
  }
  json recommendation = nullptr;
  if (s.recommendation) {
    json items = json::array();
    for (const auto& p : s.recommendation->items) {
      const auto* r = d.catalog.find(p.requirement);
      items.push_back({{"requirement_id", p.requirement.str()},
                       {"label", r ? r->label : std::string{}},
                       {"raw_value", p.raw_value},
                       {"clamped_value", p.clamped_value},
                       {"neighbor_support", p.neighbor_support}});
    }
    const auto& params = s.recommendation->params;
    recommendation = {{"params", {{"n", params.n_seeds}, {"m", params.m_neighbors}, {"k", params.k_recommendations}}},
                      {"form", std::string(cf::to_string(s.recommendation->form))},
                      {"items", std::move(items)}};
  }
  json feedback = json::array();
  for (const auto& f : s.feedback) {
    feedback.push_back({{"requirement_id", f.requirement_id.str()}, {"stars", f.stars}});
  }
  return {{"id", s.id.str()},
          {"stakeholder_id", s.stakeholder.id.str()},
          {"education_level", std::string(to_string(s.stakeholder.education_level))},
          {"state", std::string(to_string(s.state))},
          {"presented_seeds", std::move(grid)},
          {"recommendation", std::move(recommendation)},
          {"feedback", std::move(feedback)},
          {"created_at", s.created_at},
          {"updated_at", s.updated_at}};
}

SessionId next_session_id(const store::Dataset& d) {
  for (std::size_t n = d.sessions.size() + 1;; ++n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%04zu", n);
    SessionId id(buf);
    if (d.find_session(id) == nullptr) return id;
  }
}

Session& require_session(store::Dataset& d, std::string_view id) {
  Session* s = d.find_session(SessionId(std::string(id)));
  if (s == nullptr) {
    throw Error(ErrorCode::kSessionNotFound, "no session '" + std::string(id) + "'");
  }
  return *s;
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kInvalidArgument:
      return 400;
    case ErrorCode::kSessionNotFound:
    case ErrorCode::kNotFound:
    case ErrorCode::kUnknownStakeholder:
      return 404;
    case ErrorCode::kMethodNotAllowed:
      return 405;
    case ErrorCode::kWrongState:
    case ErrorCode::kDuplicateId:
    case ErrorCode::kCatalogTooSmall:
      return 409;
    case ErrorCode::kIoError:
    case ErrorCode::kSchemaVersionMismatch:
    case ErrorCode::kInternal:
      return 500;
    default:
      return 422;
  }
}

Service::Service(store::Dataset dataset, SessionConfig config,
                 std::optional<std::filesystem::path> store_path, Clock clock)
    : dataset_(std::move(dataset)),
      config_(config),
      store_path_(std::move(store_path)),
      clock_(std::move(clock)) {
  config_.validate();
  if (dataset_.matrix.scale() != config_.scale) {
    throw Error(ErrorCode::kInvalidArgument, "service scale differs from the stored rating scale");
  }
  dataset_.validate();
}

std::unique_ptr<Service> Service::open(const std::filesystem::path& store_path, SessionConfig config,
                                       const Catalog& catalog, const RatingMatrix* initial_ratings,
                                       Clock clock) {
  if (std::filesystem::exists(store_path)) {
    auto dataset = store::load_state(store_path);
    config.scale = dataset.matrix.scale();
    return std::make_unique<Service>(std::move(dataset), config, store_path, std::move(clock));
  }
  auto dataset = store::Dataset::over(catalog, config.scale);
  if (initial_ratings != nullptr) dataset.matrix = *initial_ratings;
  dataset.validate();
  store::save_state(dataset, store_path);
  return std::make_unique<Service>(std::move(dataset), config, store_path, std::move(clock));
}

store::Dataset Service::snapshot() const {
  std::shared_lock lock(mutex_);
  return dataset_;
}

void Service::persist() const {
  std::shared_lock lock(mutex_);
  if (store_path_) store::save_state(dataset_, *store_path_);
}

template <class Mutation>
Response Service::mutate(Mutation&& mutation) {
  std::unique_lock lock(mutex_);
  store::Dataset working = dataset_;
  Response response = mutation(working);
  if (store_path_) store::save_state(working, *store_path_);
  dataset_ = std::move(working);
  return response;
}

Response Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    return route(method, path, body);
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(ErrorCode::kInternal, e.what());
  }
}

Response Service::route(std::string_view method, std::string_view path, std::string_view body) {
  const auto parts = split_path(path);
  const bool get = method == "GET";
  const bool post = method == "POST";
  auto wrong_method = [&] {
    return error_response(ErrorCode::kMethodNotAllowed,
                          std::string(method) + " is not supported on " + std::string(path));
  };

  if (parts.size() == 1 && parts[0] == "catalog") {
    if (!get) return wrong_method();
    std::shared_lock lock(mutex_);
    json items = json::array();
    for (const auto& r : dataset_.catalog.items()) items.push_back(requirement_json(r));
    return json_response(200, {{"requirements", std::move(items)},
                               {"scale", {{"min", config_.scale.min}, {"max", config_.scale.max}}},
                               {"config", {{"n", config_.n_seeds},
                                           {"m", config_.m_neighbors},
                                           {"k", config_.k_recommendations},
                                           {"form", std::string(cf::to_string(config_.prediction_form))}}}});
  }

  if (parts.size() == 2 && parts[0] == "analytics" && parts[1] == "satisfaction") {
    if (!get) return wrong_method();
    std::shared_lock lock(mutex_);
    const auto feedback = dataset_.feedback();
    return {200, analytics::report_json(analytics::satisfaction_report(feedback))};
  }

  if (parts.size() == 1 && parts[0] == "sessions") {
    if (!post) return wrong_method();
    const json request = parse_body(body);
    const StakeholderId who(string_member(request, "stakeholder_id"));
    EducationLevel level = EducationLevel::kUnspecified;
    if (request.contains("education_level")) {
      const auto& value = request.at("education_level");
      if (!value.is_string()) throw Error(ErrorCode::kInvalidArgument, "education_level must be a string");
      try {
        level = parse_education_level(value.get<std::string>());
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidArgument, e.what());
      }
    }
    return mutate([&](store::Dataset& d) {
      auto session = workflow::start_session(next_session_id(d), {who, level}, config_, d.catalog,
                                             d.matrix, clock_());
      d.sessions.push_back(std::move(session));
      return json_response(201, session_json(d.sessions.back(), d));
    });
  }

  if (parts.size() >= 2 && parts[0] == "sessions") {
    const auto id = parts[1];
    if (parts.size() == 2) {
      if (!get) return wrong_method();
      std::shared_lock lock(mutex_);
      return json_response(200, session_json(require_session(dataset_, id), dataset_));
    }
    if (parts.size() != 3) return error_response(ErrorCode::kNotFound, "no route " + std::string(path));
    const auto action = parts[2];

    if (action == "ratings") {
      if (!post) return wrong_method();
      const json request = parse_body(body);
      std::vector<ItemScore> ratings;
      for (const auto& entry : array_member(request, "ratings")) {
        ratings.push_back({RequirementId(string_member(entry, "requirement_id")), int_member(entry, "score")});
      }
      return mutate([&](store::Dataset& d) {
        Session& s = require_session(d, id);
        workflow::submit_seed_ratings(s, d.matrix, ratings, clock_());
        return json_response(200, session_json(s, d));
      });
    }
    if (action == "recommendations") {
      if (!post) return wrong_method();
      parse_body(body);
      return mutate([&](store::Dataset& d) {
        Session& s = require_session(d, id);
        workflow::get_recommendations(s, config_, d.matrix, clock_());
        return json_response(200, session_json(s, d));
      });
    }
    if (action == "feedback") {
      if (!post) return wrong_method();
      const json request = parse_body(body);
      std::vector<ItemStars> feedback;
      for (const auto& entry : array_member(request, "feedback")) {
        feedback.push_back({RequirementId(string_member(entry, "requirement_id")), int_member(entry, "stars")});
      }
      return mutate([&](store::Dataset& d) {
        Session& s = require_session(d, id);
        workflow::submit_feedback(s, feedback, clock_());
        return json_response(200, session_json(s, d));
      });
    }
  }
  return error_response(ErrorCode::kNotFound, "no route " + std::string(method) + " " + std::string(path));
}

// --- HTTP adapter -------------------------------------------------------

struct HttpServer::Impl {
  explicit Impl(Service& s) : service(s) {}

  Service& service;
  httplib::Server server;
  std::atomic<bool> bound{false};
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const auto response = impl_->service.handle(req.method, req.path, req.body);
    res.status = response.status;
    res.set_content(response.body, "application/json");
  };
  impl_->server.Get(".*", forward);
  impl_->server.Post(".*", forward);
  impl_->server.Put(".*", forward);
  impl_->server.Delete(".*", forward);
  impl_->server.Patch(".*", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound_port = port;
  bool ok = false;
  if (port == 0) {
    bound_port = impl_->server.bind_to_any_port(host.c_str());
    ok = bound_port > 0;
  } else {
    ok = impl_->server.bind_to_port(host.c_str(), port);
  }
  if (!ok) {
    throw Error(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound_port;
}

void HttpServer::listen() {
  if (!impl_->bound) throw Error(ErrorCode::kIoError, "server is not bound");
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace reqrec::service
