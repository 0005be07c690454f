#include "service.hpp"

#include <httplib.h>

#include <iostream>

namespace contextdb::tools {

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    std::string target = req.path;
    if (!req.params.empty()) {
      std::string query;
      for (const auto& [k, v] : req.params) {
        query += (query.empty() ? "" : "&") + k + "=" + httplib::detail::encode_query_param(v);
      }
      target += "?" + query;
    }
    Response r = service.handle(req.method, target, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  impl_->server.Get(".*", forward);
  impl_->server.Post(".*", forward);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

int serve(Service& service, const std::string& host, int port) {
  HttpServer server(service);
  if (server.bind(host, port) < 0) {
    std::cerr << "cannot listen on " << host << ":" << port << "\n";
    return 2;
  }
  std::cerr << "listening on " << host << ":" << port << "\n";
  return server.listen() ? 0 : 2;
}

}  // namespace contextdb::tools
