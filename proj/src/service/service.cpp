#include "coevo/service.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coevo/config_io.hpp"

namespace coevo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Color parse_color(std::string_view s) {
  if (s == "white") return Color::White;
  if (s == "black") return Color::Black;
  throw ParseError("bad color: " + std::string(s));
}

Termination::Outcome parse_outcome(std::string_view s) {
  using O = Termination::Outcome;
  for (O o : {O::Ongoing, O::Checkmate, O::TechnicalTie, O::FullBlockDefeat, O::StalemateDefeat,
              O::StalemateDraw})
    if (outcome_name(o) == s) return o;
  throw ParseError("bad outcome: " + std::string(s));
}

json optional_color(const std::optional<Color>& c) {
  return c ? json(color_name(*c)) : json(nullptr);
}

std::optional<Color> read_optional_color(const json& j) {
  if (j.is_null()) return std::nullopt;
  return parse_color(j.get<std::string>());
}

constexpr const char* kCategories[] = {"material", "ap", "rp", "mobility", "proximity", "mp"};

int* category(SideScores& s, int i) {
  int* fields[] = {&s.material, &s.ap, &s.rp, &s.mobility, &s.proximity, &s.mp};
  return fields[i];
}

// Every wire read goes through here so schema errors surface as ParseError.
template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string("wire format: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("wire format: ") + e.what());
  }
}

}  // namespace

std::string_view status_name(SessionStatus s) {
  switch (s) {
    case SessionStatus::AwaitingHuman: return "awaiting_human";
    case SessionStatus::EngineThinking: return "engine_thinking";
    case SessionStatus::Finished: return "finished";
  }
  return "?";
}

static SessionStatus parse_status(std::string_view s) {
  for (SessionStatus v :
       {SessionStatus::AwaitingHuman, SessionStatus::EngineThinking, SessionStatus::Finished})
    if (status_name(v) == s) return v;
  throw ParseError("bad status: " + std::string(s));
}

// --- wire format ----------------------------------------------------------

json breakdown_to_json(const ScoreBreakdown& b) {
  json sides;
  for (Color c : {Color::White, Color::Black}) {
    SideScores s = b.sides[static_cast<int>(c)];
    json o;
    for (int i = 0; i < 6; ++i) o[kCategories[i]] = *category(s, i);
    o["sum"] = s.sum();
    sides[std::string(color_name(c))] = o;
  }
  return {{"perspective", color_name(b.perspective)},
          {"termination",
           {{"outcome", outcome_name(b.termination.outcome)},
            {"winner", optional_color(b.termination.winner)},
            {"loser", optional_color(b.termination.loser)}}},
          {"sides", sides},
          {"total", b.total}};
}

ScoreBreakdown breakdown_from_json(const json& j) {
  return guarded([&] {
    ScoreBreakdown b;
    b.perspective = parse_color(j.at("perspective").get<std::string>());
    const json& t = j.at("termination");
    b.termination.outcome = parse_outcome(t.at("outcome").get<std::string>());
    b.termination.winner = read_optional_color(t.at("winner"));
    b.termination.loser = read_optional_color(t.at("loser"));
    for (Color c : {Color::White, Color::Black}) {
      const json& o = j.at("sides").at(std::string(color_name(c)));
      SideScores& s = b.sides[static_cast<int>(c)];
      for (int i = 0; i < 6; ++i) *category(s, i) = o.at(kCategories[i]).get<int>();
    }
    b.total = j.at("total").get<int>();
    return b;
  });
}

json snapshot_to_json(const SessionSnapshot& s) {
  json log = json::array();
  for (const auto& m : s.move_log)
    log.push_back({{"ply", m.ply},
                   {"move", m.move},
                   {"by", color_name(m.by)},
                   {"engine", m.engine},
                   {"breakdown", m.breakdown ? breakdown_to_json(*m.breakdown) : json(nullptr)}});
  json result = nullptr;
  if (s.result) result = {{"outcome", s.result->outcome}, {"winner", optional_color(s.result->winner)}};
  return {{"schema_version", kWireSchemaVersion},
          {"id", s.id},
          {"fen", s.fen},
          {"cells", std::string(s.cells.begin(), s.cells.end())},
          {"side_to_move", color_name(s.side_to_move)},
          {"human_color", color_name(s.human_color)},
          {"status", status_name(s.status)},
          {"ply", s.ply()},
          {"legal_moves", s.legal_moves},
          {"last_engine_breakdown",
           s.last_engine_breakdown ? breakdown_to_json(*s.last_engine_breakdown) : json(nullptr)},
          {"result", result},
          {"move_log", log},
          {"config", config_to_json(s.config)}};
}

SessionSnapshot snapshot_from_json(const json& j) {
  return guarded([&] {
    if (j.at("schema_version").get<int>() != kWireSchemaVersion)
      throw ParseError("unsupported schema_version");
    SessionSnapshot s;
    s.id = j.at("id").get<std::string>();
    s.fen = j.at("fen").get<std::string>();
    std::string cells = j.at("cells").get<std::string>();
    if (cells.size() != 64) throw ParseError("cells must have 64 entries");
    std::copy(cells.begin(), cells.end(), s.cells.begin());
    s.side_to_move = parse_color(j.at("side_to_move").get<std::string>());
    s.human_color = parse_color(j.at("human_color").get<std::string>());
    s.status = parse_status(j.at("status").get<std::string>());
    s.legal_moves = j.at("legal_moves").get<std::vector<std::string>>();
    if (!j.at("last_engine_breakdown").is_null())
      s.last_engine_breakdown = breakdown_from_json(j.at("last_engine_breakdown"));
    if (const json& r = j.at("result"); !r.is_null())
      s.result = GameResult{r.at("outcome").get<std::string>(), read_optional_color(r.at("winner"))};
    for (const json& m : j.at("move_log")) {
      LoggedMove lm;
      lm.ply = m.at("ply").get<int>();
      lm.move = m.at("move").get<std::string>();
      lm.by = parse_color(m.at("by").get<std::string>());
      lm.engine = m.at("engine").get<bool>();
      if (!m.at("breakdown").is_null()) lm.breakdown = breakdown_from_json(m.at("breakdown"));
      s.move_log.push_back(std::move(lm));
    }
    s.config = config_from_json(j.at("config"));
    if (j.at("ply").get<int>() != s.ply()) throw ParseError("ply does not match move_log");
    return s;
  });
}

// --- session log ------------------------------------------------------------

SessionLog parse_session_log(std::string_view text) {
  SessionLog log;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    auto fail = [&](const std::string& why) {
      throw ParseError("session log line " + std::to_string(lineno) + ": " + why);
    };
    if (!header) {
      int version = 0;
      if (tag != "coevo-session" || !(ls >> version) || version != 1) fail("bad header");
      header = true;
    } else if (tag == "id") {
      ls >> log.id;
    } else if (tag == "human") {
      std::string c;
      ls >> c;
      log.human = parse_color(c);
    } else if (tag == "config") {
      std::string rest;
      std::getline(ls, rest);
      try {
        log.config = config_from_json(json::parse(rest));
      } catch (const json::exception& e) {
        fail(e.what());
      } catch (const ConfigError& e) {
        fail(e.what());
      }
    } else if (tag == "move") {
      int ply = 0;
      std::string mv, who;
      if (!(ls >> ply >> mv >> who) || (who != "human" && who != "engine")) fail("bad move record");
      if (ply != static_cast<int>(log.moves.size()) + 1) fail("ply out of sequence");
      log.moves.emplace_back(mv, who == "engine");
    } else if (tag == "resign") {
      std::string c;
      ls >> c;
      log.resigned = parse_color(c);
    } else {
      fail("unknown record \"" + tag + "\"");
    }
  }
  if (!header) throw ParseError("session log: empty");
  if (log.id.empty()) throw ParseError("session log: missing id");
  return log;
}

// --- service ----------------------------------------------------------------

struct GameService::Session {
  mutable std::mutex m;
  mutable std::condition_variable cv;
  std::string id;
  Color human = Color::White;
  EngineConfig cfg;
  Board board;
  std::unique_ptr<Engine> engine;
  SessionStatus status = SessionStatus::AwaitingHuman;
  std::vector<LoggedMove> log;
  std::optional<ScoreBreakdown> last_breakdown;
  std::optional<GameResult> result;
  std::string log_path;
  std::string log_text;
  std::thread worker;
};

GameService::GameService(ServiceOptions opts) : opts_(std::move(opts)) {
  if (!opts_.log_dir.empty()) fs::create_directories(opts_.log_dir);
}

GameService::~GameService() {
  std::map<std::string, std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(mutex_);
    all = sessions_;
  }
  for (auto& [_, s] : all) {
    std::thread t;
    {
      std::lock_guard lock(s->m);
      t = std::move(s->worker);
    }
    if (t.joinable()) t.join();
  }
}

std::shared_ptr<GameService::Session> GameService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound("no session " + id);
  return it->second;
}

void GameService::append(Session& s, const std::string& line) {
  if (!s.log_path.empty()) {
    std::ofstream out(s.log_path, std::ios::app);
    out << line << '\n';
    out.flush();
    if (!out) throw Error("cannot write session log " + s.log_path);
  }
  s.log_text += line;
  s.log_text += '\n';
}

SessionSnapshot GameService::snapshot(const Session& s) const {
  SessionSnapshot snap;
  snap.id = s.id;
  snap.fen = to_fen(s.board);
  for (int i = 0; i < 64; ++i) {
    Square sq = Square::from_index(i);
    auto id = s.board.at(sq);
    if (!id) {
      snap.cells[i] = '.';
      continue;
    }
    char letter = piece_letter(s.board.kind_of(*id));
    snap.cells[i] = id->color == Color::White ? letter : static_cast<char>(letter - 'A' + 'a');
  }
  snap.side_to_move = s.board.side_to_move();
  snap.human_color = s.human;
  snap.status = s.status;
  if (s.status == SessionStatus::AwaitingHuman)
    for (const Move& m : legal_moves(s.board)) snap.legal_moves.push_back(to_text(m));
  snap.last_engine_breakdown = s.last_breakdown;
  snap.result = s.result;
  snap.move_log = s.log;
  snap.config = s.cfg;
  return snap;
}

void GameService::settle(Session& s) {
  Termination t = detect_termination(s.board, {s.cfg.fide_stalemate});
  if (t.terminal()) {
    s.status = SessionStatus::Finished;
    s.result = GameResult{std::string(outcome_name(t.outcome)), t.winner};
  } else {
    s.status = s.board.side_to_move() == s.human ? SessionStatus::AwaitingHuman
                                                 : SessionStatus::EngineThinking;
  }
  s.cv.notify_all();
}

// Called with s->m held and status EngineThinking. The previous worker has
// already released the lock for the last time, so joining cannot deadlock.
void GameService::start_engine(const std::shared_ptr<Session>& s) {
  if (s->worker.joinable()) s->worker.join();
  s->worker = std::thread([this, s] { engine_turn(s); });
}

void GameService::engine_turn(std::shared_ptr<Session> s) {
  Board position;
  {
    std::lock_guard lock(s->m);
    position = s->board;
  }
  std::optional<Move> chosen;
  std::string failure;
  try {
    chosen = s->engine->choose_move(position).move;
  } catch (const std::exception& e) {
    failure = e.what();
  }
  std::lock_guard lock(s->m);
  if (s->status != SessionStatus::EngineThinking) return;  // resigned meanwhile
  if (!chosen) {
    s->status = SessionStatus::Finished;
    s->result = GameResult{"engine_error: " + failure, std::nullopt};
    s->cv.notify_all();
    return;
  }
  const Color engine = opposite(s->human);
  const int ply = static_cast<int>(s->log.size()) + 1;
  append(*s, "move " + std::to_string(ply) + " " + to_text(*chosen) + " engine");
  s->board.play(*chosen);
  s->last_breakdown = evaluate_board(s->board, engine, *opts_.tables, {s->cfg.fide_stalemate});
  s->log.push_back({ply, to_text(*chosen), engine, true, s->last_breakdown});
  settle(*s);
}

SessionSnapshot GameService::new_game(const EngineConfig& cfg, Color human) {
  cfg.validate();
  auto s = std::make_shared<Session>();
  s->human = human;
  s->cfg = cfg;
  s->board = Board::initial();
  s->engine = std::make_unique<Engine>(cfg, *opts_.tables);
  {
    std::lock_guard lock(mutex_);
    s->id = "s" + std::to_string(next_id_++);
    sessions_[s->id] = s;
  }
  std::lock_guard lock(s->m);
  if (!opts_.log_dir.empty()) s->log_path = (fs::path(opts_.log_dir) / (s->id + ".log")).string();
  append(*s, "coevo-session 1");
  append(*s, "id " + s->id);
  append(*s, "human " + std::string(color_name(human)));
  append(*s, "config " + config_to_json(cfg).dump());
  settle(*s);
  if (s->status == SessionStatus::EngineThinking) start_engine(s);
  return snapshot(*s);
}

SessionSnapshot GameService::submit_move(const std::string& id, std::string_view text) {
  auto s = find(id);
  std::lock_guard lock(s->m);
  if (s->status == SessionStatus::Finished) throw WrongTurn("game " + id + " is finished");
  if (s->status != SessionStatus::AwaitingHuman) throw WrongTurn("engine is thinking");
  Move m = parse_move(s->board, text);
  const int ply = static_cast<int>(s->log.size()) + 1;
  append(*s, "move " + std::to_string(ply) + " " + to_text(m) + " human");
  s->board.play(m);
  s->log.push_back({ply, to_text(m), s->human, false, std::nullopt});
  settle(*s);
  if (s->status == SessionStatus::EngineThinking) start_engine(s);
  return snapshot(*s);
}

SessionSnapshot GameService::resign(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->m);
  if (s->status == SessionStatus::Finished) throw WrongTurn("game " + id + " is finished");
  append(*s, "resign " + std::string(color_name(s->human)));
  s->status = SessionStatus::Finished;
  s->result = GameResult{"resignation", opposite(s->human)};
  s->cv.notify_all();
  return snapshot(*s);
}

SessionSnapshot GameService::state(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->m);
  return snapshot(*s);
}

std::vector<SessionSnapshot> GameService::list() const {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [_, s] : sessions_) all.push_back(s);
  }
  std::vector<SessionSnapshot> out;
  for (const auto& s : all) {
    std::lock_guard lock(s->m);
    out.push_back(snapshot(*s));
  }
  return out;
}

std::string GameService::log(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->m);
  return s->log_text;
}

bool GameService::wait_idle(const std::string& id, double timeout_s) const {
  auto s = find(id);
  std::unique_lock lock(s->m);
  return s->cv.wait_for(lock, std::chrono::duration<double>(timeout_s),
                        [&] { return s->status != SessionStatus::EngineThinking; });
}

std::size_t GameService::recover() {
  if (opts_.log_dir.empty()) return 0;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(opts_.log_dir))
    if (entry.path().extension() == ".log") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::size_t loaded = 0;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    SessionLog rec = parse_session_log(buf.str());
    {
      std::lock_guard lock(mutex_);
      if (sessions_.count(rec.id)) continue;
    }
    auto s = std::make_shared<Session>();
    s->id = rec.id;
    s->human = rec.human;
    s->cfg = rec.config;
    s->board = Board::initial();
    s->engine = std::make_unique<Engine>(rec.config, *opts_.tables);
    s->log_path = path.string();
    s->log_text = buf.str();
    const Color engine = opposite(rec.human);
    for (const auto& [text, by_engine] : rec.moves) {
      Move m = parse_move(s->board, text);
      Color mover = s->board.side_to_move();
      s->board.play(m);
      std::optional<ScoreBreakdown> bd;
      if (by_engine)
        bd = s->last_breakdown = evaluate_board(s->board, engine, *opts_.tables, {s->cfg.fide_stalemate});
      s->log.push_back({static_cast<int>(s->log.size()) + 1, to_text(m), mover, by_engine, bd});
    }
    std::lock_guard lock(s->m);
    if (rec.resigned) {
      s->status = SessionStatus::Finished;
      s->result = GameResult{"resignation", opposite(*rec.resigned)};
    } else {
      settle(*s);
    }
    {
      std::lock_guard g(mutex_);
      sessions_[s->id] = s;
      if (s->id.size() > 1 && s->id[0] == 's') {
        try {
          next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(s->id.substr(1)) + 1);
        } catch (const std::exception&) {
        }
      }
    }
    if (s->status == SessionStatus::EngineThinking) start_engine(s);
    ++loaded;
  }
  return loaded;
}

}  // namespace coevo
