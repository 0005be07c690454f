#pragma once

#include <contextdb/database.hpp>
#include <contextdb/relational.hpp>

#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace contextdb::tools {

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// One loaded snapshot. Requests work on the snapshot current at arrival.
struct Snapshot {
  std::shared_ptr<const Context> ctx;
  std::shared_ptr<const DatabaseInstance> db;
  std::optional<BackingMap> backing;
};

/// Transport-independent request handler for the HTTP API; the CLI calls it
/// too so both print identical JSON.
class Service {
 public:
  explicit Service(Snapshot snapshot);

  /// `target` is the path with an optional query string.
  Response handle(const std::string& method, const std::string& target, const std::string& body) const;

  /// Atomically replaces the snapshot; requests in flight keep the old one.
  void swap(Snapshot snapshot);
  std::shared_ptr<const Snapshot> current() const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> snapshot_;
};

/// HTTP/1.1 front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds the socket; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); returns false if the loop failed.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocks serving `service` over HTTP/1.1.
int serve(Service& service, const std::string& host, int port);

}  // namespace contextdb::tools
