#include "coevo/coevolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace coevo {

namespace {

bool valid_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::size_t roulette(const std::vector<double>& cumulative, Rng& rng) {
  double r = unit(rng) * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

double best_of(const Population& p) {
  return p.fitness.empty() ? 0.0 : *std::max_element(p.fitness.begin(), p.fitness.end());
}

std::vector<std::string> decode_line(const MixedChromosome& m, const Board& board) {
  std::vector<std::string> out;
  Board sim = board.detached();
  for (std::size_t i = 0; i < m.genes.size(); ++i) {
    if (detect_termination(sim).terminal()) break;
    auto mv = decode(m.genes[i], m.color_of(i), sim);
    if (!mv) {
      out.push_back("--");
      sim.play_null();
      continue;
    }
    out.push_back(to_text(*mv));
    sim.play(*mv);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < v.size(); ++i) ss << (i ? "," : "") << v[i];
  return ss.str();
}

}  // namespace

void EngineConfig::validate() const {
  if (population_size < 1) throw ConfigError("population_size must be at least 1");
  if (generations < 0) throw ConfigError("generations must be non-negative");
  if (depth < 0) throw ConfigError("depth must be non-negative");
  if (!valid_probability(crossover_prob)) throw ConfigError("crossover_prob outside [0,1]");
  if (!valid_probability(uniform_level)) throw ConfigError("uniform_level outside [0,1]");
  if (!valid_probability(mutation_prob_per_bit))
    throw ConfigError("mutation_prob_per_bit outside [0,1]");
  if (elitism_count < 0 || elitism_count > population_size)
    throw ConfigError("elitism_count must be in [0, population_size]");
  if (mix_white < 1 || mix_white > population_size)
    throw ConfigError("mix_white (P) must be in [1, population_size]");
  if (mix_black < 1 || mix_black > population_size)
    throw ConfigError("mix_black (Q) must be in [1, population_size]");
  if (!(time_budget_s >= 0.0)) throw ConfigError("time_budget_s must be non-negative");
}

std::size_t EngineConfig::fitness_evaluations_per_move() const {
  std::size_t rounds = generations == 0 ? 1 : static_cast<std::size_t>(generations);
  return rounds * static_cast<std::size_t>(mix_white) * static_cast<std::size_t>(mix_black);
}

std::vector<std::size_t> Population::ranking() const {
  std::vector<std::size_t> idx(members.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
  return idx;
}

Populations init_populations(const Board& board, const EngineConfig& cfg, Rng& rng) {
  Populations pops;
  for (Color c : {Color::White, Color::Black}) {
    Population& p = pops[static_cast<int>(c)];
    p.color = c;
    p.members.reserve(static_cast<std::size_t>(cfg.population_size));
    for (int i = 0; i < cfg.population_size; ++i)
      p.members.push_back(repair(random_chromosome(c, cfg.chromosome_length(), rng), board, rng));
  }
  return pops;
}

void evaluate_population(Population& pop, const Board& board, const ScoreTables& t,
                         const FitnessOptions& opts) {
  pop.fitness.resize(pop.members.size());
  for (std::size_t i = 0; i < pop.members.size(); ++i)
    pop.fitness[i] = evaluate_solo(pop.members[i], board, t, opts);
}

Population step_generation(const Population& pop, const Board& board, const EngineConfig& cfg,
                           Rng& rng, const ScoreTables& t) {
  const std::size_t k = pop.members.size();
  Population next;
  next.color = pop.color;
  next.members.reserve(k);
  next.fitness.reserve(k);

  std::vector<std::size_t> order = pop.ranking();
  std::size_t elites = std::min(k, static_cast<std::size_t>(cfg.elitism_count));
  for (std::size_t i = 0; i < elites; ++i) {
    next.members.push_back(pop.members[order[i]]);
    next.fitness.push_back(pop.fitness[order[i]]);
  }

  double lo = *std::min_element(pop.fitness.begin(), pop.fitness.end());
  std::vector<double> cumulative(k);
  double acc = 0;
  for (std::size_t i = 0; i < k; ++i) {
    acc += pop.fitness[i] - lo + 1.0;
    cumulative[i] = acc;
  }

  const VariationConfig var = cfg.variation();
  const FitnessOptions opts = cfg.fitness();
  auto admit = [&](Chromosome c) {
    c = repair(mutate(std::move(c), var, rng), board, rng);
    next.fitness.push_back(evaluate_solo(c, board, t, opts));
    next.members.push_back(std::move(c));
  };
  while (next.members.size() < k) {
    const Chromosome& a = pop.members[roulette(cumulative, rng)];
    const Chromosome& b = pop.members[roulette(cumulative, rng)];
    auto [x, y] = uniform_crossover(a, b, var, rng);
    admit(std::move(x));
    if (next.members.size() < k) admit(std::move(y));
  }
  return next;
}

std::vector<MixedChromosome> form_mixed(const Populations& pops, const EngineConfig& cfg,
                                        Color first) {
  const Population& w = pops[0];
  const Population& b = pops[1];
  std::vector<std::size_t> wr = w.ranking();
  std::vector<std::size_t> br = b.ranking();
  std::size_t p = std::min(wr.size(), static_cast<std::size_t>(cfg.mix_white));
  std::size_t q = std::min(br.size(), static_cast<std::size_t>(cfg.mix_black));
  std::vector<MixedChromosome> out;
  out.reserve(p * q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j)
      out.push_back(mix(w.members[wr[i]], b.members[br[j]], first, wr[i], br[j]));
  return out;
}

std::string MoveDiagnostics::to_text() const {
  std::ostringstream ss;
  ss << "generations " << generations_run << "\n";
  ss << "fitness_evaluations " << fitness_evaluations << "\n";
  ss << "best_fitness " << best_fitness << "\n";
  ss << "best_mixed_by_generation " << join(best_mixed_by_generation) << "\n";
  ss << "best_static_white " << join(best_static_white) << "\n";
  ss << "best_static_black " << join(best_static_black) << "\n";
  ss << "principal_line";
  for (const auto& m : principal_line) ss << ' ' << m;
  ss << "\n";
  ss << "budget_expired " << (budget_expired ? 1 : 0) << "\n";
  ss << "elapsed_s " << elapsed_s << "\n";
  return ss.str();
}

MoveChoice deliberate(Populations& pops, const Board& board, const EngineConfig& cfg, Rng& rng,
                      const ScoreTables& t) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  const Color side = board.side_to_move();
  if (!has_legal_move(board)) throw NoLegalMove("no legal move in the current position");
  if (pops[0].members.empty() || pops[1].members.empty()) pops = init_populations(board, cfg, rng);

  const FitnessOptions opts = cfg.fitness();
  for (auto& p : pops)
    if (p.fitness.size() != p.members.size()) evaluate_population(p, board, t, opts);

  MoveDiagnostics diag;
  std::optional<MixedChromosome> best;
  double best_score = 0;
  const int rounds = std::max(1, cfg.generations);
  for (int g = 0; g < rounds; ++g) {
    if (cfg.generations > 0)
      for (auto& p : pops) p = step_generation(p, board, cfg, rng, t);
    diag.best_static_white.push_back(best_of(pops[0]));
    diag.best_static_black.push_back(best_of(pops[1]));

    double round_best = 0;
    bool round_any = false;
    for (const MixedChromosome& m : form_mixed(pops, cfg, side)) {
      double s = evaluate_mixed(m, board, side, t, opts);
      ++diag.fitness_evaluations;
      if (!round_any || s > round_best) round_best = s, round_any = true;
      if (!best || s > best_score) {
        best = m;
        best_score = s;
      }
    }
    diag.best_mixed_by_generation.push_back(round_best);
    ++diag.generations_run;

    if (cfg.time_budget_s > 0) {
      std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started;
      if (spent.count() > cfg.time_budget_s && g + 1 < rounds) {
        diag.budget_expired = true;
        break;
      }
    }
  }

  std::optional<Move> move = decode(best->genes[0], side, board);
  if (!move) {
    // Repair guarantees gene 0 of every own chromosome; this is a safety net.
    move = legal_moves(board).front();
  }
  diag.best_fitness = best_score;
  diag.principal_line = decode_line(*best, board);
  diag.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {*move, std::move(diag)};
}

MoveChoice choose_move(const Board& board, const EngineConfig& cfg, Rng& rng,
                       const ScoreTables& t) {
  Populations pops;
  return deliberate(pops, board, cfg, rng, t);
}

void advance_populations(Populations& pops, const Board& board, Rng& rng) {
  for (auto& p : pops) {
    for (auto& c : p.members) {
      std::size_t n = c.genes.size();
      if (n == 0) continue;
      c.genes.erase(c.genes.begin());
      c.genes.push_back(random_gene(rng));
      c = repair(std::move(c), board, rng);
    }
    p.fitness.clear();
  }
}

Engine::Engine(EngineConfig cfg, const ScoreTables& t)
    : cfg_(cfg), tables_(&t), rng_(cfg.rng_seed) {
  cfg_.validate();
}

void Engine::reset() {
  pops_.reset();
  rng_.seed(cfg_.rng_seed);
}

MoveChoice Engine::choose_move(const Board& board) {
  const Color side = board.side_to_move();
  if (!has_legal_move(board)) throw NoLegalMove("no legal move in the current position");
  if (pops_) {
    // Carry over only across exactly one own move and one reply.
    if (side == last_side_ && board.ply_count() == last_ply_ + 2)
      advance_populations(*pops_, board, rng_);
    else
      pops_.reset();
  }
  if (!pops_) pops_.emplace();
  MoveChoice choice = deliberate(*pops_, board, cfg_, rng_, *tables_);
  last_ply_ = board.ply_count();
  last_side_ = side;
  return choice;
}

}  // namespace coevo
