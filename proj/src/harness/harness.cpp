#include "coevo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "coevo/config_io.hpp"

namespace coevo {

namespace {

using nlohmann::ordered_json;

const char* side_name(Side s) { return s == Side::A ? "a" : "b"; }
const char* color_word(Color c) { return c == Color::White ? "white" : "black"; }

ordered_json game_json(const GameRecord& g, bool timings) {
  ordered_json j;
  j["index"] = g.index;
  j["seed"] = g.seed;
  j["a_color"] = color_word(g.a_color);
  j["plies"] = g.plies;
  j["outcome"] = g.cutoff ? "cutoff" : std::string(outcome_name(g.termination.outcome));
  j["winner"] = g.winner ? ordered_json(side_name(*g.winner)) : ordered_json(nullptr);
  j["moves"] = g.moves;
  j["final_fen"] = g.final_fen;
  if (timings) j["elapsed_s"] = g.elapsed_s;
  return j;
}

ordered_json series_json(const SeriesResult& r, bool timings) {
  ordered_json j;
  j["schema_version"] = 1;
  j["name"] = r.spec.name;
  j["games"] = r.spec.games;
  j["seed_base"] = r.spec.seed_base;
  j["max_plies"] = r.spec.max_plies;
  j["color_alternation"] = r.spec.color_alternation;
  j["a_starts_white"] = r.spec.a_starts_white;
  j["config_a"] = config_to_json(r.spec.config_a);
  j["config_b"] = config_to_json(r.spec.config_b);
  j["wins_a"] = r.wins_a;
  j["wins_b"] = r.wins_b;
  j["ties"] = r.ties;
  j["cutoffs"] = r.cutoffs;
  ordered_json games = ordered_json::array();
  for (const auto& g : r.games) games.push_back(game_json(g, timings));
  j["records"] = std::move(games);
  if (timings) j["wall_s"] = r.wall_s;
  return j;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void MatchSpec::validate() const {
  if (games < 0) throw ConfigError("games must be non-negative");
  if (max_plies < 1) throw ConfigError("max_plies must be at least 1");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  config_a.validate();
  config_b.validate();
}

Color MatchSpec::a_color(int index) const {
  bool white = a_starts_white;
  if (color_alternation && index % 2 == 1) white = !white;
  return white ? Color::White : Color::Black;
}

std::string GameRecord::to_log_line() const {
  std::ostringstream ss;
  ss << "game=" << index << " seed=" << seed << " a=" << color_word(a_color) << " plies=" << plies
     << " outcome=" << (cutoff ? std::string("cutoff") : std::string(outcome_name(termination.outcome)))
     << " winner=" << (winner ? side_name(*winner) : "-") << " moves=";
  for (std::size_t i = 0; i < moves.size(); ++i) ss << (i ? "," : "") << moves[i];
  return ss.str();
}

double SeriesResult::a_decisive_share() const {
  return decisive() == 0 ? 0.5 : static_cast<double>(wins_a) / decisive();
}

std::string SeriesResult::canonical() const { return series_json(*this, false).dump(); }
std::string SeriesResult::to_json() const { return series_json(*this, true).dump(2); }

std::uint64_t engine_seed(std::uint64_t game_seed, Color c) {
  return derive_seed(game_seed, static_cast<std::uint64_t>(c));
}

GameRecord play_game(const MatchSpec& spec, int index, const ScoreTables& t) {
  const auto started = std::chrono::steady_clock::now();
  GameRecord rec;
  rec.index = index;
  rec.seed = spec.seed_base + static_cast<std::uint64_t>(index);
  rec.a_color = spec.a_color(index);

  auto configured = [&](Color c) {
    EngineConfig cfg = c == rec.a_color ? spec.config_a : spec.config_b;
    cfg.rng_seed = engine_seed(rec.seed, c);
    return cfg;
  };
  Engine white(configured(Color::White), t);
  Engine black(configured(Color::Black), t);
  const RulesOptions rules{spec.config_a.fide_stalemate};

  Board board = Board::initial();
  while (true) {
    rec.termination = detect_termination(board, rules);
    if (rec.termination.terminal()) break;
    if (rec.plies >= spec.max_plies) {
      rec.cutoff = true;
      break;
    }
    Engine& mover = board.side_to_move() == Color::White ? white : black;
    Move m = mover.choose_move(board).move;
    rec.moves.push_back(to_text(m));
    board.play(m);
    ++rec.plies;
  }
  if (rec.termination.winner)
    rec.winner = *rec.termination.winner == rec.a_color ? Side::A : Side::B;
  rec.final_fen = to_fen(board);
  rec.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

SeriesResult run_series(const MatchSpec& spec, const ScoreTables& t) {
  spec.validate();
  const auto started = std::chrono::steady_clock::now();
  SeriesResult r;
  r.spec = spec;
  r.games.resize(static_cast<std::size_t>(spec.games));

  unsigned workers = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(1, spec.games)));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next++; i < spec.games; i = next++) {
      try {
        r.games[static_cast<std::size_t>(i)] = play_game(spec, i, t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (const auto& g : r.games) {
    if (g.cutoff)
      ++r.cutoffs;
    else if (!g.winner)
      ++r.ties;
    else if (*g.winner == Side::A)
      ++r.wins_a;
    else
      ++r.wins_b;
  }
  r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

Interval wilson_interval(int k, int n, double z) {
  if (n <= 0) return {0.0, 1.0};
  double p = static_cast<double>(k) / n;
  double z2 = z * z;
  double denom = 1 + z2 / n;
  double centre = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// --- presets --------------------------------------------------------------

namespace {

EngineConfig desk_config() {
  EngineConfig c;
  c.population_size = 20;
  c.generations = 10;
  c.depth = 1;
  c.mix_white = 10;
  c.mix_black = 10;
  c.time_budget_s = 0;
  return c;
}

Experiment pair(std::string id, std::string label_a, std::string label_b, EngineConfig a,
                EngineConfig b) {
  Experiment e;
  e.id = id;
  e.label_a = std::move(label_a);
  e.label_b = std::move(label_b);
  e.spec.name = std::move(id);
  e.spec.config_a = a;
  e.spec.config_b = b;
  e.spec.games = 20;
  e.spec.max_plies = 200;
  return e;
}

Experiment crossover_ablation() {
  EngineConfig off = desk_config();
  off.crossover_prob = 0;
  Experiment e = pair("crossover", "crossover on", "crossover off", desk_config(), off);
  e.reported_a_share = 1.0;
  e.min_a_share = 0.7;
  return e;
}

Experiment mutation_ablation() {
  EngineConfig off = desk_config();
  off.mutation_prob_per_bit = 0;
  Experiment e = pair("mutation", "mutation on", "mutation off", desk_config(), off);
  e.reported_a_share = 1.0;
  e.min_a_share = 0.7;
  return e;
}

std::vector<Experiment> suite() {
  std::vector<Experiment> out;
  {
    EngineConfig gens = desk_config();
    gens.population_size = 10;
    gens.generations = 40;
    EngineConfig pop = desk_config();
    pop.mix_white = pop.mix_black = 20;
    Experiment e = pair("population-vs-generations", "K10 x G40", "K20 x G10 full", gens, pop);
    e.reported_a_share = 0.82;
    out.push_back(e);
  }
  {
    EngineConfig d0 = desk_config();
    d0.depth = 0;
    Experiment e = pair("depth", "depth 1", "depth 0", desk_config(), d0);
    e.reported_a_share = 0.54;
    out.push_back(e);
  }
  out.push_back(crossover_ablation());
  {
    EngineConfig wide = desk_config();
    wide.uniform_level = 0.4;
    Experiment e = pair("crossover-level", "level 20%", "level 40%", desk_config(), wide);
    e.reported_a_share = 0.57;
    out.push_back(e);
  }
  out.push_back(mutation_ablation());
  {
    EngineConfig lo = desk_config();
    lo.mutation_prob_per_bit = 0.002;
    EngineConfig hi = desk_config();
    hi.mutation_prob_per_bit = 0.004;
    Experiment e = pair("mutation-level", "mutation 0.4%", "mutation 0.2%", hi, lo);
    e.reported_a_share = 0.62;
    out.push_back(e);
  }
  {
    EngineConfig flips = desk_config();
    flips.mutation_prob_per_bit = 0.004;
    EngineConfig inv = flips;
    inv.inversion_enabled = true;
    Experiment e = pair("inversion", "inversion", "mutation 0.4%", inv, flips);
    e.reported_a_share = 0.56;
    out.push_back(e);
  }
  return out;
}

std::vector<Experiment> ablations() {
  Experiment self = pair("self-play", "desk", "desk", desk_config(), desk_config());
  self.symmetric = true;
  return {crossover_ablation(), mutation_ablation(), self};
}

std::vector<Experiment> smoke() {
  EngineConfig tiny = desk_config();
  tiny.population_size = 6;
  tiny.generations = 2;
  tiny.mix_white = tiny.mix_black = 3;
  Experiment e = pair("smoke", "tiny", "tiny", tiny, tiny);
  e.spec.games = 2;
  e.spec.max_plies = 16;
  e.symmetric = true;
  return {e};
}

}  // namespace

std::vector<std::string> preset_names() { return {"suite", "ablations", "smoke"}; }

std::vector<Experiment> preset(std::string_view name, int games, std::uint64_t seed) {
  std::vector<Experiment> out;
  if (name == "suite")
    out = suite();
  else if (name == "ablations")
    out = ablations();
  else if (name == "smoke")
    out = smoke();
  else
    throw ConfigError("unknown preset: " + std::string(name));
  for (auto& e : out) {
    if (games > 0) e.spec.games = games;
    if (seed > 0) e.spec.seed_base = seed;
  }
  return out;
}

// --- reports --------------------------------------------------------------

std::string report(std::span<const ReportRow> rows, std::string_view format) {
  if (format != "text" && format != "csv" && format != "markdown")
    throw UnknownFormat("unknown report format: " + std::string(format));

  const std::vector<std::string> header = {
      "series", "games", "wins_a", "wins_b", "ties", "cutoffs", "a_win_pct",
      "a_decisive_share", "ci_low", "ci_high", "reported_a_share", "threshold", "verdict"};
  std::vector<std::vector<std::string>> table;
  for (const ReportRow& row : rows) {
    const SeriesResult& r = *row.result;
    if (r.games.empty()) continue;
    const Experiment* e = row.experiment;
    Interval ci = wilson_interval(r.wins_a, r.decisive());
    int games = static_cast<int>(r.games.size());
    std::string reported = e && e->reported_a_share ? fixed(*e->reported_a_share, 2) : "-";
    std::string threshold = "-";
    std::string verdict = "-";
    if (e && e->min_a_share) {
      threshold = ">=" + fixed(*e->min_a_share, 2);
      verdict = r.a_decisive_share() >= *e->min_a_share ? "pass" : "fail";
    } else if (e && e->symmetric) {
      double sigma = r.decisive() ? std::sqrt(0.25 / r.decisive()) : 0.0;
      threshold = "0.50+-" + fixed(3 * sigma, 2);
      verdict = std::abs(r.a_decisive_share() - 0.5) <= 3 * sigma ? "pass" : "fail";
    }
    table.push_back({r.spec.name, std::to_string(games), std::to_string(r.wins_a),
                     std::to_string(r.wins_b), std::to_string(r.ties), std::to_string(r.cutoffs),
                     fixed(games ? 100.0 * r.wins_a / games : 0.0, 1),
                     fixed(r.a_decisive_share(), 3), fixed(ci.low, 3), fixed(ci.high, 3),
                     reported, threshold, verdict});
  }

  std::ostringstream out;
  if (format == "csv") {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << "\n";
    };
    line(header);
    for (const auto& r : table) line(r);
  } else if (format == "markdown") {
    auto line = [&](const std::vector<std::string>& cells) {
      out << "|";
      for (const auto& c : cells) out << ' ' << c << " |";
      out << "\n";
    };
    line(header);
    out << "|";
    for (std::size_t i = 0; i < header.size(); ++i) out << " --- |";
    out << "\n";
    for (const auto& r : table) line(r);
  } else {
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& r : table)
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        out << cells[i];
        if (i + 1 < cells.size()) out << std::string(width[i] - cells[i].size() + 2, ' ');
      }
      out << "\n";
    };
    line(header);
    for (const auto& r : table) line(r);
  }
  return out.str();
}

std::string report(const SeriesResult& result, std::string_view format) {
  ReportRow row{nullptr, &result};
  return report(std::span<const ReportRow>(&row, 1), format);
}

}  // namespace coevo
