#include <filesystem>
#include <fstream>
#include <thread>

#include "coevo/http_server.hpp"
#include "coevo/service.hpp"
#include "doctest.h"
#include "httplib.h"

using namespace coevo;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Deliberates for a noticeable fraction of a second.
EngineConfig slow_config() {
  EngineConfig c;
  c.population_size = 100;
  c.generations = 40;
  c.time_budget_s = 0;
  return c;
}

EngineConfig quick_config() {
  EngineConfig c;
  c.population_size = 8;
  c.generations = 2;
  c.depth = 1;
  c.mix_white = c.mix_black = 3;
  c.time_budget_s = 0;
  return c;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("coevo_service_" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) +
            "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("new game with human white awaits the human") {
  GameService svc;
  SessionSnapshot s = svc.new_game(quick_config(), Color::White);
  CHECK(s.status == SessionStatus::AwaitingHuman);
  CHECK(s.legal_moves.size() == 20);
  CHECK(s.ply() == 0);
  CHECK(std::string(s.cells.begin(), s.cells.begin() + 8) == "RNBQKBNR");
  CHECK(std::string(s.cells.begin() + 56, s.cells.end()) == "rnbqkbnr");
}

TEST_CASE("new game with human black lets the engine move first") {
  GameService svc;
  SessionSnapshot s = svc.new_game(quick_config(), Color::Black);
  CHECK(s.status == SessionStatus::EngineThinking);
  CHECK(s.legal_moves.empty());
  REQUIRE(svc.wait_idle(s.id));
  s = svc.state(s.id);
  CHECK(s.status == SessionStatus::AwaitingHuman);
  REQUIRE(s.ply() == 1);
  CHECK(s.move_log[0].engine);
  CHECK(s.move_log[0].by == Color::White);
  CHECK(s.last_engine_breakdown.has_value());
  CHECK(s.last_engine_breakdown->perspective == Color::White);
}

TEST_CASE("invalid config is rejected before a session exists") {
  GameService svc;
  EngineConfig bad = quick_config();
  bad.population_size = 0;
  CHECK_THROWS_AS(svc.new_game(bad, Color::White), ConfigError);
  CHECK(svc.list().empty());
}

TEST_CASE("moves, rejections and wrong turn") {
  GameService svc;
  std::string id = svc.new_game(quick_config(), Color::White).id;
  SessionSnapshot before = svc.state(id);
  CHECK_THROWS_AS(svc.submit_move(id, "e2e5"), IllegalMove);
  CHECK_THROWS_AS(svc.submit_move(id, "zz"), ParseError);
  CHECK(svc.state(id) == before);
  CHECK_THROWS_AS(svc.submit_move("nope", "e2e4"), SessionNotFound);

  REQUIRE(svc.submit_move(id, "e2e4").move_log[0].move == "e2e4");
  REQUIRE(svc.wait_idle(id));
  SessionSnapshot s = svc.state(id);
  CHECK(s.status == SessionStatus::AwaitingHuman);
  CHECK(s.ply() == 2);
  CHECK(s.side_to_move == Color::White);
  // Logged moves replay to the snapshot's position.
  Board b = Board::initial();
  for (const auto& m : s.move_log) b.play(parse_move(b, m.move));
  CHECK(to_fen(b) == s.fen);
}

TEST_CASE("submission while the engine thinks is WrongTurn") {
  GameService svc;
  std::string id = svc.new_game(slow_config(), Color::White).id;
  SessionSnapshot after = svc.submit_move(id, "e2e4");
  CHECK(after.status == SessionStatus::EngineThinking);
  CHECK(after.legal_moves.empty());
  CHECK_THROWS_AS(svc.submit_move(id, "d2d4"), WrongTurn);
  // Snapshot reads do not wait for the deliberation.
  CHECK(svc.state(id).status == SessionStatus::EngineThinking);
  REQUIRE(svc.wait_idle(id));
  CHECK(svc.state(id).ply() == 2);
}

TEST_CASE("castling by the human") {
  GameService svc;
  std::string id = svc.new_game(quick_config(), Color::White).id;
  // Clear f1 and g1, whatever the engine answers.
  for (const char* mv : {"g1f3", "g2g3", "f1g2"}) {
    SessionSnapshot s = svc.state(id);
    REQUIRE(s.status == SessionStatus::AwaitingHuman);
    svc.submit_move(id, mv);
    REQUIRE(svc.wait_idle(id));
  }
  SessionSnapshot s = svc.state(id);
  if (std::find(s.legal_moves.begin(), s.legal_moves.end(), "O-O") != s.legal_moves.end()) {
    s = svc.submit_move(id, "O-O");
    CHECK(s.move_log[6].move == "O-O");
    CHECK(s.cells[6] == 'K');
    CHECK(s.cells[5] == 'R');
  }
}

TEST_CASE("resignation finishes the game") {
  GameService svc;
  std::string id = svc.new_game(quick_config(), Color::White).id;
  SessionSnapshot s = svc.resign(id);
  CHECK(s.status == SessionStatus::Finished);
  REQUIRE(s.result.has_value());
  CHECK(s.result->outcome == "resignation");
  CHECK(s.result->winner == Color::Black);
  CHECK(s.legal_moves.empty());
  CHECK_THROWS_AS(svc.submit_move(id, "e2e4"), WrongTurn);
  CHECK_THROWS_AS(svc.resign(id), WrongTurn);
}

TEST_CASE("checkmate by the human finishes the game") {
  // Engine replies are not controllable, so the line is seeded through a log.
  TempDir dir;
  fs::create_directories(dir.path);
  {
    std::ofstream out(dir.path / "s7.log");
    out << "coevo-session 1\nid s7\nhuman white\nconfig {\"population_size\":8,\"generations\":2,"
           "\"depth\":1,\"mix_white\":3,\"mix_black\":3,\"time_budget_s\":0}\n"
           "move 1 e2e4 human\nmove 2 e7e5 engine\nmove 3 f1c4 human\nmove 4 b8c6 engine\n"
           "move 5 d1h5 human\nmove 6 g8f6 engine\n";
  }
  GameService svc({dir.path.string()});
  CHECK(svc.recover() == 1);
  SessionSnapshot s = svc.state("s7");
  CHECK(s.status == SessionStatus::AwaitingHuman);
  s = svc.submit_move("s7", "h5f7");
  CHECK(s.status == SessionStatus::Finished);
  REQUIRE(s.result.has_value());
  CHECK(s.result->outcome == "checkmate");
  CHECK(s.result->winner == Color::White);
  CHECK(s.legal_moves.empty());
  // New sessions continue after recovered ids.
  CHECK(svc.new_game(quick_config(), Color::White).id == "s8");
}

TEST_CASE("persistence and recovery") {
  TempDir dir;
  std::string id;
  SessionSnapshot live;
  {
    GameService svc({dir.path.string()});
    id = svc.new_game(quick_config(), Color::White).id;
    svc.submit_move(id, "d2d4");
    REQUIRE(svc.wait_idle(id));
    svc.submit_move(id, "c2c4");
    REQUIRE(svc.wait_idle(id));
    live = svc.state(id);
    CHECK(fs::exists(dir.path / (id + ".log")));
    SessionLog log = parse_session_log(svc.log(id));
    CHECK(log.id == id);
    CHECK(log.moves.size() == 4);
    CHECK(log.config == quick_config());
  }
  GameService again({dir.path.string()});
  CHECK(again.recover() == 1);
  SessionSnapshot back = again.state(id);
  CHECK(back.fen == live.fen);
  CHECK(back.move_log == live.move_log);
  CHECK(back.status == live.status);
  CHECK(back == live);
}

TEST_CASE("recovery resumes an interrupted engine turn") {
  TempDir dir;
  fs::create_directories(dir.path);
  {
    std::ofstream out(dir.path / "s3.log");
    out << "coevo-session 1\nid s3\nhuman white\nconfig {\"population_size\":6,\"generations\":1,"
           "\"depth\":0,\"mix_white\":2,\"mix_black\":2,\"time_budget_s\":0}\nmove 1 e2e4 human\n";
  }
  GameService svc({dir.path.string()});
  CHECK(svc.recover() == 1);
  REQUIRE(svc.wait_idle("s3"));
  SessionSnapshot s = svc.state("s3");
  CHECK(s.ply() == 2);
  CHECK(s.move_log[1].engine);
  CHECK(svc.log("s3").find("move 2 ") != std::string::npos);
}

TEST_CASE("session log parser rejects damage") {
  CHECK_THROWS_AS(parse_session_log(""), ParseError);
  CHECK_THROWS_AS(parse_session_log("coevo-session 2\nid a\n"), ParseError);
  CHECK_THROWS_AS(parse_session_log("coevo-session 1\n"), ParseError);
  CHECK_THROWS_AS(parse_session_log("coevo-session 1\nid a\nmove 2 e2e4 human\n"), ParseError);
  CHECK_THROWS_AS(parse_session_log("coevo-session 1\nid a\nwhat\n"), ParseError);
  CHECK_THROWS_AS(parse_session_log("coevo-session 1\nid a\nconfig {\"depth\":-1}\n"), ParseError);
  SessionLog ok = parse_session_log("coevo-session 1\nid a\nhuman black\nresign black\n");
  CHECK(ok.human == Color::Black);
  CHECK(ok.resigned == Color::Black);
}

TEST_CASE("snapshot wire round trip") {
  GameService svc;
  std::string id = svc.new_game(quick_config(), Color::Black).id;
  REQUIRE(svc.wait_idle(id));
  for (SessionSnapshot s : {svc.state(id), svc.resign(id)}) {
    json j = snapshot_to_json(s);
    CHECK(snapshot_from_json(j) == s);
    CHECK(snapshot_from_json(json::parse(j.dump())) == s);
    CHECK(j["schema_version"] == 1);
  }
  json j = snapshot_to_json(svc.state(id));
  json bad = j;
  bad["schema_version"] = 2;
  CHECK_THROWS_AS(snapshot_from_json(bad), ParseError);
  bad = j;
  bad.erase("cells");
  CHECK_THROWS_AS(snapshot_from_json(bad), ParseError);
  bad = j;
  bad["status"] = "sleeping";
  CHECK_THROWS_AS(snapshot_from_json(bad), ParseError);
  bad = j;
  bad["ply"] = 7;
  CHECK_THROWS_AS(snapshot_from_json(bad), ParseError);
}

TEST_CASE("breakdown wire round trip") {
  Board b = parse_fen("6k1/4q3/3b4/4n3/8/5N2/1B2Q3/6K1 w - - 0 1");
  ScoreBreakdown bd = evaluate_board(b, Color::Black);
  CHECK(breakdown_from_json(breakdown_to_json(bd)) == bd);
  CHECK(breakdown_to_json(bd)["sides"]["white"]["sum"] == bd.sides[0].sum());
}

TEST_CASE("http endpoints") {
  GameService svc;
  HttpServer server(svc);
  int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread th([&] { server.serve(); });
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);

  json create = {{"human_color", "white"},
                 {"config", {{"population_size", 100}, {"generations", 40}, {"time_budget_s", 0}}}};
  auto res = cli.Post("/api/v1/sessions", create.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  json snap = json::parse(res->body);
  std::string id = snap["id"];
  CHECK(snap["status"] == "awaiting_human");
  CHECK(snap["legal_moves"].size() == 20);
  CHECK(snapshot_from_json(snap).config.population_size == 100);

  res = cli.Post("/api/v1/sessions", R"({"config":{"population_size":0}})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body)["error"]["code"] == "ConfigError");

  res = cli.Post("/api/v1/sessions/" + id + "/move", R"({"move":"e2e5"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 422);
  CHECK(json::parse(res->body)["error"]["code"] == "IllegalMove");
  res = cli.Post("/api/v1/sessions/" + id + "/move", R"({"mv":"e2e4"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = cli.Post("/api/v1/sessions/" + id + "/move", "{", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  res = cli.Post("/api/v1/sessions/" + id + "/move", R"({"move":"e2e4"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["status"] == "engine_thinking");
  res = cli.Post("/api/v1/sessions/" + id + "/move", R"({"move":"d2d4"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 409);
  CHECK(json::parse(res->body)["error"]["code"] == "WrongTurn");
  REQUIRE(svc.wait_idle(id));

  res = cli.Get("/api/v1/sessions/" + id);
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["ply"] == 2);

  res = cli.Get("/api/v1/sessions");
  REQUIRE(res);
  json list = json::parse(res->body);
  REQUIRE(list["sessions"].size() == 1);
  CHECK(list["sessions"][0]["id"] == id);

  res = cli.Get("/api/v1/sessions/" + id + "/log");
  REQUIRE(res);
  CHECK(res->body.rfind("coevo-session 1\n", 0) == 0);
  CHECK(res->body.find("move 1 e2e4 human") != std::string::npos);

  res = cli.Get("/api/v1/sessions/missing");
  REQUIRE(res);
  CHECK(res->status == 404);

  res = cli.Post("/api/v1/sessions/" + id + "/resign", "", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["result"]["outcome"] == "resignation");
  res = cli.Post("/api/v1/sessions/" + id + "/resign", "", "application/json");
  REQUIRE(res);
  CHECK(res->status == 409);

  server.stop();
  th.join();
}
