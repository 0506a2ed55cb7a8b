#include "coevo/http_server.hpp"

#include "coevo/config_io.hpp"
#include "httplib.h"

namespace coevo {

using nlohmann::json;

struct HttpServer::Impl {
  GameService& service;
  httplib::Server server;
  explicit Impl(GameService& s) : service(s) {}
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const char* code, const std::string& msg) {
  send_json(res, status, {{"error", {{"code", code}, {"message", msg}}}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("request body: ") + e.what());
  }
}

// Maps service exceptions to status codes.
template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const SessionNotFound& e) {
    send_error(res, 404, "SessionNotFound", e.what());
  } catch (const WrongTurn& e) {
    send_error(res, 409, "WrongTurn", e.what());
  } catch (const IllegalMove& e) {
    send_error(res, 422, "IllegalMove", e.what());
  } catch (const ParseError& e) {
    send_error(res, 400, "ParseError", e.what());
  } catch (const ConfigError& e) {
    send_error(res, 400, "ConfigError", e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "ParseError", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "InternalError", e.what());
  }
}

}  // namespace

HttpServer::HttpServer(GameService& service, std::string static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  GameService& svc = impl_->service;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  srv.Post("/api/v1/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      json body = parse_body(req);
      if (!body.is_object()) throw ParseError("request body must be an object");
      Color human = Color::White;
      if (auto it = body.find("human_color"); it != body.end()) {
        std::string c = it->get<std::string>();
        if (c != "white" && c != "black") throw ParseError("human_color must be white or black");
        human = c == "white" ? Color::White : Color::Black;
      }
      EngineConfig cfg;
      if (auto it = body.find("config"); it != body.end()) cfg = config_from_json(*it);
      send_json(res, 201, snapshot_to_json(svc.new_game(cfg, human)));
    });
  });
  srv.Get("/api/v1/sessions", [&svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      json list = json::array();
      for (const auto& s : svc.list())
        list.push_back({{"id", s.id},
                        {"status", status_name(s.status)},
                        {"human_color", color_name(s.human_color)},
                        {"ply", s.ply()}});
      send_json(res, 200, {{"schema_version", kWireSchemaVersion}, {"sessions", list}});
    });
  });
  srv.Get(R"(/api/v1/sessions/([A-Za-z0-9_-]+))",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send_json(res, 200, snapshot_to_json(svc.state(req.matches[1]))); });
          });
  srv.Post(R"(/api/v1/sessions/([A-Za-z0-9_-]+)/move)",
           [&svc](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               json body = parse_body(req);
               if (!body.is_object() || !body.contains("move") || !body["move"].is_string())
                 throw ParseError("request needs a \"move\" string");
               std::string mv = body["move"].get<std::string>();
               send_json(res, 200, snapshot_to_json(svc.submit_move(req.matches[1], mv)));
             });
           });
  srv.Post(R"(/api/v1/sessions/([A-Za-z0-9_-]+)/resign)",
           [&svc](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] { send_json(res, 200, snapshot_to_json(svc.resign(req.matches[1]))); });
           });
  srv.Get(R"(/api/v1/sessions/([A-Za-z0-9_-]+)/log)",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { res.set_content(svc.log(req.matches[1]), "text/plain"); });
          });
  if (!static_dir.empty()) srv.set_mount_point("/", static_dir);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace coevo
