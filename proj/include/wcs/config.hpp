#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wcs/sim.hpp"

namespace wcs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses a config document. Every field is optional and defaults to the
/// shipped SimConfig; unknown keys are rejected with their full path.
SimConfig config_from_json(const nlohmann::json& doc);

/// Loads and parses a JSON config file; errors name the path or key.
SimConfig load_config_file(const std::string& path);

/// Serializes the effective config in the same schema config_from_json
/// accepts (round-trips losslessly).
nlohmann::json config_to_json(const SimConfig& config);

}  // namespace wcs
