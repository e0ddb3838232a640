// config.hpp - JSON run configuration
#pragma once

#include "hallwave/scenarios.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hallwave {

using json = nlohmann::json;

// Scenario names understood by run(); params keys are validated per scenario.
const std::vector<std::string>& scenario_names();
const std::vector<std::string>& scenario_param_keys(const std::string& scenario);

struct RunConfig {
    std::string name;
    std::string scenario;
    LatticeSetup lattice;
    std::vector<EmitterPlacement> emitters;
    DynamicsSettings dynamics;
    json params = json::object();
    std::uint64_t seed{0};
    std::string output;
    std::vector<std::string> defaults_applied;  // "key=value" for every default filled in
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config(const json& doc);
RunConfig load_config(const std::string& path);

json to_json(const RunConfig& cfg);
json potential_to_json(const PotentialSpec& spec);
PotentialSpec potential_from_json(const json& j, const std::string& where);

// Default params for a scenario on the given lattice; null entries mean "derive at run time".
json scenario_defaults(const std::string& scenario, const LatticeSetup& lattice);

}  // namespace hallwave
