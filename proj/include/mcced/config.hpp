#pragma once

// Scenario configuration files.
//
// One YAML document per experiment, with sections
//   scenario / particles / topology / external / integrator / output.
// Unknown keys and invariant violations are parse errors anchored to the
// offending line.

#include <string>

#include <nlohmann/json.hpp>

#include "mcced/scenario.hpp"

namespace mcced {

enum class RunKind { trajectory, symmetry_suite, algebra_suite };

const char* to_string(RunKind k);

struct OutputOptions {
  /// Write every stride-th sample to the trajectory CSV.
  int stride = 1;
  /// Trailing window for the asymptotic check; <= 0 selects t_end / 10.
  double asymptotic_window = 0.0;
};

struct ScenarioConfig {
  std::string description;
  RunKind kind = RunKind::trajectory;
  Scenario scenario;
  OutputOptions output;
};

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin);

/// Reads and validates a scenario file. Errors: io (unreadable), parse.
ScenarioConfig parse_scenario(const std::string& path);

/// Fully resolved configuration, defaults filled in.
nlohmann::ordered_json to_json(const ScenarioConfig& c);

/// Same content as YAML, suitable for parse_scenario_text.
std::string to_yaml(const ScenarioConfig& c);

}  // namespace mcced
