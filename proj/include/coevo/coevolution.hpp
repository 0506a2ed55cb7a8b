#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "coevo/evaluator.hpp"
#include "coevo/genome.hpp"

namespace coevo {

struct EngineConfig {
  int population_size = 100;  // K
  int generations = 20;       // G
  int depth = 4;              // chromosome length is depth + 1
  double crossover_prob = 0.7;
  double uniform_level = 0.2;
  double mutation_prob_per_bit = 0.04;
  bool inversion_enabled = false;
  int elitism_count = 2;
  int mix_white = 10;  // P
  int mix_black = 10;  // Q
  FitnessMode fitness_mode = FitnessMode::Sum;
  int skip_penalty = -50;
  std::uint64_t rng_seed = 1;
  double time_budget_s = 10.0;  // 0 disables the budget
  bool fide_stalemate = false;

  void validate() const;
  std::size_t chromosome_length() const { return static_cast<std::size_t>(depth) + 1; }
  VariationConfig variation() const {
    return {crossover_prob, uniform_level, mutation_prob_per_bit, inversion_enabled};
  }
  FitnessOptions fitness() const { return {fitness_mode, skip_penalty, {fide_stalemate}}; }
  // Mixed evaluations per move: G x P x Q, or P x Q when G = 0.
  std::size_t fitness_evaluations_per_move() const;

  bool operator==(const EngineConfig&) const = default;
};

struct Population {
  Color color = Color::White;
  std::vector<Chromosome> members;
  std::vector<double> fitness;  // static fitness, aligned with members

  // Member indices sorted by fitness, best first; ties keep index order.
  std::vector<std::size_t> ranking() const;
};

using Populations = std::array<Population, 2>;  // indexed by Color

Populations init_populations(const Board& board, const EngineConfig& cfg, Rng& rng);

// Static fitness of every member: its own genes played with opponent passes.
void evaluate_population(Population& pop, const Board& board, const ScoreTables& t,
                         const FitnessOptions& opts);

// Elitism, roulette selection on shifted fitness, crossover, mutation, repair
// and re-evaluation of the new members.
Population step_generation(const Population& pop, const Board& board, const EngineConfig& cfg,
                           Rng& rng, const ScoreTables& t);

// P best White x Q best Black, interleaved from the side to move.
std::vector<MixedChromosome> form_mixed(const Populations& pops, const EngineConfig& cfg,
                                        Color first);

struct MoveDiagnostics {
  int generations_run = 0;
  std::size_t fitness_evaluations = 0;  // mixed playouts
  double best_fitness = 0;
  std::vector<double> best_mixed_by_generation;
  std::vector<double> best_static_white;
  std::vector<double> best_static_black;
  std::vector<std::string> principal_line;  // decoded best mixed chromosome
  bool budget_expired = false;
  double elapsed_s = 0;  // wall clock; not part of any canonical output

  // One "key value" pair per line.
  std::string to_text() const;
};

struct MoveChoice {
  Move move;
  MoveDiagnostics diagnostics;
};

// Runs one deliberation on `pops` (initialized against `board` when empty).
MoveChoice deliberate(Populations& pops, const Board& board, const EngineConfig& cfg, Rng& rng,
                      const ScoreTables& t = ScoreTables::defaults());

// Stateless entry point: fresh populations from `rng`.
MoveChoice choose_move(const Board& board, const EngineConfig& cfg, Rng& rng,
                       const ScoreTables& t = ScoreTables::defaults());

// Drops gene 0 of every chromosome, appends a random gene and repairs against
// `board`, the position after the engine's move and the reply.
void advance_populations(Populations& pops, const Board& board, Rng& rng);

// A player that keeps its populations between moves.
class Engine {
 public:
  explicit Engine(EngineConfig cfg, const ScoreTables& t = ScoreTables::defaults());

  MoveChoice choose_move(const Board& board);
  void reset();

  const EngineConfig& config() const { return cfg_; }
  const std::optional<Populations>& populations() const { return pops_; }

 private:
  EngineConfig cfg_;
  const ScoreTables* tables_;
  Rng rng_;
  std::optional<Populations> pops_;
  std::size_t last_ply_ = 0;
  Color last_side_ = Color::White;
};

}  // namespace coevo
