#pragma once

#include <string>

#include "hecc/scenario.hpp"

namespace hecc {

/// Reads a JSON config whose sections mirror ScenarioConfig. Missing keys keep
/// their defaults. Power-like keys ending in _dbm / _dbm_per_hz are converted
/// to W here. Unknown keys are rejected so typos do not pass silently.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);

/// The config as JSON text, SI units throughout.
std::string dump_config(const ScenarioConfig& config);

}  // namespace hecc
