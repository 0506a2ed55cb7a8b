#pragma once

#include <string>

#include "coevo/coevolution.hpp"
#include "json.hpp"

namespace coevo {

std::string_view fitness_mode_name(FitnessMode m);
FitnessMode parse_fitness_mode(std::string_view s);

nlohmann::json config_to_json(const EngineConfig& cfg);
// Missing keys keep their defaults; unknown keys and bad types throw ConfigError.
// The result is validated.
EngineConfig config_from_json(const nlohmann::json& j);
EngineConfig load_config(const std::string& path);

}  // namespace coevo
