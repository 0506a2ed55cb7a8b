#pragma once

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "coevo/coevolution.hpp"
#include "json.hpp"

namespace coevo {

class SessionNotFound : public Error {
 public:
  using Error::Error;
};

inline constexpr int kWireSchemaVersion = 1;

enum class SessionStatus : std::uint8_t { AwaitingHuman, EngineThinking, Finished };
std::string_view status_name(SessionStatus s);

struct LoggedMove {
  int ply = 0;  // 1-based
  std::string move;
  Color by = Color::White;
  bool engine = false;
  std::optional<ScoreBreakdown> breakdown;  // engine moves: board after the move, engine view

  bool operator==(const LoggedMove&) const = default;
};

struct GameResult {
  std::string outcome;  // outcome_name() or "resignation"
  std::optional<Color> winner;

  bool operator==(const GameResult&) const = default;
};

struct SessionSnapshot {
  std::string id;
  std::string fen;
  std::array<char, 64> cells{};  // a1 = 0 .. h8 = 63; FEN letter or '.'
  Color side_to_move = Color::White;
  Color human_color = Color::White;
  SessionStatus status = SessionStatus::AwaitingHuman;
  std::vector<std::string> legal_moves;  // human moves, only while AwaitingHuman
  std::optional<ScoreBreakdown> last_engine_breakdown;
  std::optional<GameResult> result;
  std::vector<LoggedMove> move_log;
  EngineConfig config;

  int ply() const { return static_cast<int>(move_log.size()); }
  bool operator==(const SessionSnapshot&) const = default;
};

nlohmann::json breakdown_to_json(const ScoreBreakdown& b);
ScoreBreakdown breakdown_from_json(const nlohmann::json& j);
nlohmann::json snapshot_to_json(const SessionSnapshot& s);
// Throws ParseError on schema violations.
SessionSnapshot snapshot_from_json(const nlohmann::json& j);

struct ServiceOptions {
  std::string log_dir;  // empty: no persistence
  const ScoreTables* tables = &ScoreTables::defaults();
};

// Human-versus-engine sessions. Engine deliberation runs on a worker thread
// per session; every transition is written to the session log before the
// call that caused it returns.
class GameService {
 public:
  explicit GameService(ServiceOptions opts = {});
  ~GameService();
  GameService(const GameService&) = delete;
  GameService& operator=(const GameService&) = delete;

  // Throws ConfigError for an invalid config.
  SessionSnapshot new_game(const EngineConfig& cfg, Color human);
  // Throws SessionNotFound, WrongTurn, ParseError or IllegalMove; the session
  // is unchanged on error.
  SessionSnapshot submit_move(const std::string& id, std::string_view text);
  SessionSnapshot resign(const std::string& id);
  SessionSnapshot state(const std::string& id) const;
  std::vector<SessionSnapshot> list() const;
  std::string log(const std::string& id) const;

  // Blocks until the session is not EngineThinking; false on timeout.
  bool wait_idle(const std::string& id, double timeout_s = 60) const;

  // Rebuilds sessions from the log directory; returns how many were loaded.
  std::size_t recover();

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  void start_engine(const std::shared_ptr<Session>& s);
  void engine_turn(std::shared_ptr<Session> s);
  void append(Session& s, const std::string& line);
  SessionSnapshot snapshot(const Session& s) const;
  void settle(Session& s);

  ServiceOptions opts_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

// Log line grammar, one record per line:
//   coevo-session 1
//   id <id>
//   human white|black
//   config <json>
//   move <ply> <coordinate move> human|engine
//   resign white|black
struct SessionLog {
  std::string id;
  Color human = Color::White;
  EngineConfig config;
  std::vector<std::pair<std::string, bool>> moves;  // text, by engine
  std::optional<Color> resigned;
};
SessionLog parse_session_log(std::string_view text);

}  // namespace coevo
