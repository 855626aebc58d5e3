#ifndef REQREC_SERVICE_HPP_
#define REQREC_SERVICE_HPP_

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "reqrec/datastore.hpp"
#include "reqrec/error.hpp"
#include "reqrec/session.hpp"

namespace reqrec::service {

/// HTTP status used for each error code.
int http_status(ErrorCode code) noexcept;

struct Response {
  int status = 200;
  /// JSON document. Errors are {"error": {"code", "message", "details"}}.
  std::string body;
};

/// The JSON API over one dataset. Requests are dispatched without any
/// transport, so the HTTP server below is a thin adapter.
///
/// Reads share a lock; mutations are serialized and applied to a copy of
/// the dataset, persisted, then swapped in, so a failed request changes
/// neither memory nor disk.
class Service {
 public:
  Service(store::Dataset dataset, SessionConfig config,
          std::optional<std::filesystem::path> store_path = std::nullopt,
          Clock clock = system_clock());

  /// Loads the store if it exists, otherwise starts an empty dataset over
  /// `catalog` (and optional initial ratings) and writes it out.
  static std::unique_ptr<Service> open(const std::filesystem::path& store_path,
                                       SessionConfig config, const Catalog& catalog,
                                       const RatingMatrix* initial_ratings = nullptr,
                                       Clock clock = system_clock());

  Response handle(std::string_view method, std::string_view path, std::string_view body);

  store::Dataset snapshot() const;
  const SessionConfig& config() const noexcept { return config_; }
  /// Writes the current dataset to the store path, if there is one.
  void persist() const;

 private:
  Response route(std::string_view method, std::string_view path, std::string_view body);
  template <class Mutation>
  Response mutate(Mutation&& mutation);

  store::Dataset dataset_;
  SessionConfig config_;
  std::optional<std::filesystem::path> store_path_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
};

/// Serves a Service over HTTP until stop() is called.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the address; port 0 picks a free port. Returns the bound port.
  /// Throws kIoError when the address cannot be bound.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace reqrec::service

#endif  // REQREC_SERVICE_HPP_
