#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "satfr/model.hpp"

namespace satfr {

/// Scenario plus the names of fields that were filled from defaults.
struct LoadedScenario {
  Scenario scenario;
  std::vector<std::string> defaulted;
};

/// Builds and validates a scenario from a JSON document. Missing or
/// ill-typed fields raise ValidationError naming the field path.
LoadedScenario scenario_from_json(const nlohmann::json& doc);

/// Reads a scenario file; IoError if unreadable, ValidationError otherwise.
LoadedScenario load_scenario_file(const std::string& path);
Scenario load_scenario(const std::string& path);

/// Fully explicit document (frequency grid as a list); reloading it
/// reproduces the scenario field for field.
nlohmann::json scenario_to_json(const Scenario& scenario);
nlohmann::json settings_to_json(const SolverSettings& settings);

void save_scenario(const Scenario& scenario, const std::string& path);

}  // namespace satfr
