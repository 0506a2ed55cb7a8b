#include <cmath>

#include "coevo/config_io.hpp"
#include "coevo/harness.hpp"
#include "doctest.h"

using namespace coevo;

namespace {

MatchSpec tiny_spec() {
  MatchSpec s;
  s.config_a.population_size = s.config_b.population_size = 6;
  s.config_a.generations = s.config_b.generations = 2;
  s.config_a.depth = s.config_b.depth = 1;
  s.config_a.mix_white = s.config_a.mix_black = 3;
  s.config_b.mix_white = s.config_b.mix_black = 2;
  s.config_a.time_budget_s = s.config_b.time_budget_s = 0;
  s.games = 4;
  s.max_plies = 24;
  s.seed_base = 100;
  return s;
}

}  // namespace

TEST_CASE("engine config json round trip") {
  EngineConfig c;
  c.population_size = 33;
  c.fitness_mode = FitnessMode::LastMove;
  c.rng_seed = 0xffffffffffffffffULL;
  c.inversion_enabled = true;
  c.time_budget_s = 2.5;
  CHECK(config_from_json(config_to_json(c)) == c);
  CHECK(config_from_json(nlohmann::json::object()) == EngineConfig{});
  CHECK_THROWS_AS(config_from_json({{"populaton_size", 3}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"population_size", 0}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"population_size", "ten"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"depth", 1.5}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"fitness_mode", "max"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ConfigError);
}

TEST_CASE("colors alternate from a_starts_white") {
  MatchSpec s;
  CHECK(s.a_color(0) == Color::White);
  CHECK(s.a_color(1) == Color::Black);
  CHECK(s.a_color(2) == Color::White);
  s.a_starts_white = false;
  CHECK(s.a_color(0) == Color::Black);
  s.color_alternation = false;
  CHECK(s.a_color(1) == Color::Black);
}

TEST_CASE("series counts and per-game invariants") {
  MatchSpec s = tiny_spec();
  SeriesResult r = run_series(s);
  REQUIRE(r.games.size() == 4);
  CHECK(r.wins_a + r.wins_b + r.ties + r.cutoffs == 4);
  for (int i = 0; i < 4; ++i) {
    const GameRecord& g = r.games[i];
    CHECK(g.index == i);
    CHECK(g.seed == 100 + static_cast<std::uint64_t>(i));
    CHECK(g.plies <= s.max_plies);
    CHECK(g.moves.size() == static_cast<std::size_t>(g.plies));
    CHECK((g.cutoff || g.termination.terminal()));
    CHECK(g.cutoff == !g.termination.terminal());
    // Replaying the logged moves reaches the logged final position.
    Board b = Board::initial();
    for (const auto& m : g.moves) b.play(parse_move(b, m));
    CHECK(to_fen(b) == g.final_fen);
  }
}

TEST_CASE("series are reproducible and thread count does not matter") {
  MatchSpec s = tiny_spec();
  s.threads = 1;
  std::string one = run_series(s).canonical();
  s.threads = 3;
  CHECK(run_series(s).canonical() == one);
  CHECK(run_series(s).canonical() == one);
}

TEST_CASE("swapping configs and colors mirrors the series") {
  MatchSpec s = tiny_spec();
  MatchSpec m = s;
  std::swap(m.config_a, m.config_b);
  m.a_starts_white = false;
  SeriesResult r = run_series(s);
  SeriesResult q = run_series(m);
  CHECK(r.wins_a == q.wins_b);
  CHECK(r.wins_b == q.wins_a);
  CHECK(r.ties == q.ties);
  CHECK(r.cutoffs == q.cutoffs);
  for (std::size_t i = 0; i < r.games.size(); ++i) {
    CHECK(r.games[i].moves == q.games[i].moves);
    CHECK(r.games[i].a_color == opposite(q.games[i].a_color));
  }
}

TEST_CASE("wilson interval") {
  Interval e = wilson_interval(0, 0);
  CHECK(e.low == 0.0);
  CHECK(e.high == 1.0);
  // Independent closed form for k = n: low = n / (n + z^2).
  Interval all = wilson_interval(20, 20);
  CHECK(all.high == doctest::Approx(1.0));
  CHECK(all.low == doctest::Approx(20.0 / (20.0 + 1.96 * 1.96)));
  Interval half = wilson_interval(50, 100);
  CHECK(half.low == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(half.high == doctest::Approx(0.5962).epsilon(1e-3));
}

TEST_CASE("reports") {
  SeriesResult empty;
  std::string csv = report(empty, "csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
  CHECK(csv.rfind("series,games,wins_a", 0) == 0);
  CHECK_THROWS_AS(report(empty, "xml"), UnknownFormat);

  SeriesResult r;
  r.spec.name = "hundred";
  r.games.resize(100);
  r.wins_a = 57;
  r.wins_b = 40;
  r.ties = 2;
  r.cutoffs = 1;
  std::string line = report(r, "csv");
  CHECK(line.find("hundred,100,57,40,2,1,57.0,0.588,") != std::string::npos);
  std::string md = report(r, "markdown");
  CHECK(md.find("| hundred | 100 | 57 |") != std::string::npos);
  CHECK(md.find("| --- |") != std::string::npos);
  std::string text = report(r, "text");
  CHECK(text.find("hundred") != std::string::npos);
}

TEST_CASE("presets") {
  auto suite = preset("suite");
  REQUIRE(suite.size() == 7);
  const double reported[] = {0.82, 0.54, 1.0, 0.57, 1.0, 0.62, 0.56};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(suite[i].reported_a_share == doctest::Approx(reported[i]));
    CHECK_NOTHROW(suite[i].spec.validate());
    CHECK(suite[i].spec.config_a.time_budget_s == 0);
  }
  // Equal mixed-evaluation budgets in the population/generations pairing.
  CHECK(suite[0].spec.config_a.fitness_evaluations_per_move() == 4000);
  CHECK(suite[0].spec.config_b.fitness_evaluations_per_move() == 4000);
  CHECK(suite[1].spec.config_b.depth == 0);
  CHECK(suite[2].spec.config_b.crossover_prob == 0);
  CHECK(suite[4].spec.config_b.mutation_prob_per_bit == 0);
  CHECK(suite[6].spec.config_a.inversion_enabled);

  auto abl = preset("ablations", 7, 42);
  REQUIRE(abl.size() == 3);
  for (const auto& e : abl) {
    CHECK(e.spec.games == 7);
    CHECK(e.spec.seed_base == 42);
    CHECK(e.spec.max_plies == 200);
    CHECK(e.spec.config_a.population_size == 20);
    CHECK(e.spec.config_a.generations == 10);
    CHECK(e.spec.config_a.depth == 1);
  }
  CHECK(abl[2].symmetric);
  CHECK(abl[2].spec.config_a == abl[2].spec.config_b);
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("game log line") {
  MatchSpec s = tiny_spec();
  s.max_plies = 4;
  GameRecord g = play_game(s, 1);
  std::string line = g.to_log_line();
  CHECK(line.rfind("game=1 seed=101 a=black plies=4 outcome=cutoff winner=- moves=", 0) == 0);
}
