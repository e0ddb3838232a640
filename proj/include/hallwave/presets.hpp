// presets.hpp - named scenario configurations
#pragma once

#include "hallwave/config.hpp"

#include <string>
#include <vector>

namespace hallwave {

struct Preset {
    std::string name;
    std::string description;
    std::string json_text;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);  // throws ConfigError listing known names
RunConfig preset_config(const std::string& name);

}  // namespace hallwave
