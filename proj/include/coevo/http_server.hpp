#pragma once

#include <memory>
#include <string>

#include "coevo/service.hpp"

namespace coevo {

// JSON endpoints over HTTP for the browser client:
//   POST /api/v1/sessions                {"human_color": "white", "config": {...}}
//   GET  /api/v1/sessions
//   GET  /api/v1/sessions/{id}
//   POST /api/v1/sessions/{id}/move      {"move": "e2e4"}
//   POST /api/v1/sessions/{id}/resign
//   GET  /api/v1/sessions/{id}/log       text/plain
// Errors are {"error": {"code": ..., "message": ...}}.
class HttpServer {
 public:
  explicit HttpServer(GameService& service, std::string static_dir = {});
  ~HttpServer();

  // Port 0 binds an ephemeral port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace coevo
