#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dbl/line_config.hpp"

namespace dbl {

/// Scenario documents are JSON objects with the top-level keys `stops`,
/// `segments`, `bus_line_segments`, `signals`, `buses`, `passenger_profiles`,
/// `constraints` and `run`. Shape errors raise ConfigError; semantic problems
/// are left to validate().
LineConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const LineConfig& config);

LineConfig load_scenario(const std::filesystem::path& path);
/// Canonical text form: sorted keys, two-space indent, trailing newline.
std::string dump_scenario(const LineConfig& config);

}  // namespace dbl
