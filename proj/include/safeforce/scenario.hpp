#pragma once

#include "safeforce/simulator.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace safeforce {

// Carries the offending field path, e.g. "limits.K_L".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& msg)
        : std::runtime_error(path.empty() ? msg : path + ": " + msg), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Angles in the file are degrees; converted to radians here.
ScenarioConfig parse_scenario(const nlohmann::json& j);
nlohmann::json parse_scenario_text(const std::string& text);  // JSON syntax errors -> ConfigError
ScenarioConfig load_scenario_file(const std::string& path);
nlohmann::json load_scenario_json(const std::string& path);

const std::vector<std::string>& preset_names();
nlohmann::json preset_json(const std::string& name);
ScenarioConfig preset(const std::string& name);

// "/F_d=-1,-2,-3" -> pointer "/F_d" and its values.
struct GridAxis {
    std::string pointer;
    std::vector<nlohmann::json> values;
};
GridAxis parse_grid(const std::string& spec);

}  // namespace safeforce
