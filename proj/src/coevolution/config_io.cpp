#include "coevo/config_io.hpp"

#include <fstream>

namespace coevo {

namespace {

using nlohmann::json;

template <class T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError("");
    } else {
      if (!it->is_number()) throw ConfigError("");
    }
    out = it->get<T>();
  } catch (const std::exception&) {
    throw ConfigError(std::string("engine config: bad value for \"") + key + "\"");
  }
}

constexpr const char* kKeys[] = {
    "population_size", "generations",   "depth",         "crossover_prob",
    "uniform_level",   "mutation_prob_per_bit", "inversion_enabled", "elitism_count",
    "mix_white",       "mix_black",     "fitness_mode",  "skip_penalty",
    "rng_seed",        "time_budget_s", "fide_stalemate"};

}  // namespace

std::string_view fitness_mode_name(FitnessMode m) {
  return m == FitnessMode::Sum ? "sum" : "last_move";
}

FitnessMode parse_fitness_mode(std::string_view s) {
  if (s == "sum") return FitnessMode::Sum;
  if (s == "last_move") return FitnessMode::LastMove;
  throw ConfigError("unknown fitness_mode: " + std::string(s));
}

json config_to_json(const EngineConfig& c) {
  return {{"population_size", c.population_size},
          {"generations", c.generations},
          {"depth", c.depth},
          {"crossover_prob", c.crossover_prob},
          {"uniform_level", c.uniform_level},
          {"mutation_prob_per_bit", c.mutation_prob_per_bit},
          {"inversion_enabled", c.inversion_enabled},
          {"elitism_count", c.elitism_count},
          {"mix_white", c.mix_white},
          {"mix_black", c.mix_black},
          {"fitness_mode", fitness_mode_name(c.fitness_mode)},
          {"skip_penalty", c.skip_penalty},
          {"rng_seed", c.rng_seed},
          {"time_budget_s", c.time_budget_s},
          {"fide_stalemate", c.fide_stalemate}};
}

EngineConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("engine config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
      throw ConfigError("engine config: unknown key \"" + key + "\"");
  EngineConfig c;
  read(j, "population_size", c.population_size);
  read(j, "generations", c.generations);
  read(j, "depth", c.depth);
  read(j, "crossover_prob", c.crossover_prob);
  read(j, "uniform_level", c.uniform_level);
  read(j, "mutation_prob_per_bit", c.mutation_prob_per_bit);
  read(j, "inversion_enabled", c.inversion_enabled);
  read(j, "elitism_count", c.elitism_count);
  read(j, "mix_white", c.mix_white);
  read(j, "mix_black", c.mix_black);
  if (auto it = j.find("fitness_mode"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("engine config: fitness_mode must be a string");
    c.fitness_mode = parse_fitness_mode(it->get<std::string>());
  }
  read(j, "skip_penalty", c.skip_penalty);
  read(j, "rng_seed", c.rng_seed);
  read(j, "time_budget_s", c.time_budget_s);
  read(j, "fide_stalemate", c.fide_stalemate);
  c.validate();
  return c;
}

EngineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open engine config: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("engine config: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace coevo
