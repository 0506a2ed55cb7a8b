#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coevo/coevolution.hpp"

namespace coevo {

struct MatchSpec {
  std::string name = "match";
  EngineConfig config_a;
  EngineConfig config_b;
  int games = 20;
  std::uint64_t seed_base = 1;
  int max_plies = 300;
  bool color_alternation = true;
  bool a_starts_white = true;
  int threads = 0;  // 0 = hardware concurrency; never affects results

  void validate() const;
  // Color played by config A in game `index`.
  Color a_color(int index) const;
};

enum class Side : std::uint8_t { A, B };

struct GameRecord {
  int index = 0;
  std::uint64_t seed = 0;
  Color a_color = Color::White;
  int plies = 0;
  Termination termination;
  bool cutoff = false;
  std::optional<Side> winner;
  std::vector<std::string> moves;
  std::string final_fen;
  double elapsed_s = 0;

  // One line: key=value fields followed by the move list.
  std::string to_log_line() const;
};

struct SeriesResult {
  MatchSpec spec;
  int wins_a = 0;
  int wins_b = 0;
  int ties = 0;
  int cutoffs = 0;
  std::vector<GameRecord> games;  // sorted by index
  double wall_s = 0;

  int decisive() const { return wins_a + wins_b; }
  // Share of decisive games won by A; 0.5 when none were decisive.
  double a_decisive_share() const;
  // Everything except timings; byte-identical across reruns.
  std::string canonical() const;
  // canonical() plus timings.
  std::string to_json() const;
};

// Per-game engine seeds depend on the game seed and the color played, so
// swapping the configs together with a_starts_white mirrors a series.
std::uint64_t engine_seed(std::uint64_t game_seed, Color c);

GameRecord play_game(const MatchSpec& spec, int index,
                     const ScoreTables& t = ScoreTables::defaults());
SeriesResult run_series(const MatchSpec& spec, const ScoreTables& t = ScoreTables::defaults());

struct Interval {
  double low = 0;
  double high = 0;
};
// 95% Wilson score interval for k successes out of n (n = 0 gives [0, 1]).
Interval wilson_interval(int k, int n, double z = 1.96);

struct Experiment {
  std::string id;
  std::string label_a;
  std::string label_b;
  MatchSpec spec;
  std::optional<double> reported_a_share;  // previously reported win share of A, in [0,1]
  std::optional<double> min_a_share;       // acceptance threshold on a_decisive_share
  bool symmetric = false;                  // identical configs: share within 3 sigma of 0.5
};

std::vector<std::string> preset_names();
// Throws ConfigError for an unknown name. `games` and `seed` override the
// preset defaults when positive.
std::vector<Experiment> preset(std::string_view name, int games = 0, std::uint64_t seed = 0);

struct ReportRow {
  const Experiment* experiment = nullptr;  // optional
  const SeriesResult* result = nullptr;
};

// Formats: "text", "csv", "markdown". Throws UnknownFormat otherwise.
std::string report(std::span<const ReportRow> rows, std::string_view format);
std::string report(const SeriesResult& result, std::string_view format);

}  // namespace coevo
