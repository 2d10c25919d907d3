#pragma once

// Batch front end: built-in experiments, deterministic runs with CSV,
// ledger and manifest output, and plot data extraction.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcced/config.hpp"
#include "mcced/dynamics.hpp"

namespace mcced {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct BuiltinScenario {
  std::string name;
  std::string description;
  std::string yaml;
};

const std::vector<BuiltinScenario>& builtin_scenarios();

/// A built-in name or a path to a scenario file.
ScenarioConfig load_scenario(const std::string& name_or_path);

/// Everything a trajectory run produces in memory.
struct RunProducts {
  TrajectoryRecord record;
  EnergyLedger ledger;
  AsymptoticReport asymptotic;
  std::optional<RunawayReport> runaway;
  std::optional<ConvergenceReport> convergence;
};

RunProducts simulate(const ScenarioConfig& cfg);

/// Scenario-specific acceptance checks of a finished trajectory run.
std::vector<CheckResult> trajectory_checks(const ScenarioConfig& cfg, const RunProducts& run);

/// Check lists of the non-trajectory experiments.
std::vector<CheckResult> symmetry_suite(const ScenarioConfig& cfg, std::uint64_t seed);
std::vector<CheckResult> algebra_suite();

/// Measured parities of the field functionals on accelerating sources.
std::vector<CheckResult> parity_table();

/// Every operator applied twice is the identity and T = Tt∘Tp, CPT = C∘P∘T,
/// over `count` random scenarios.
CheckResult involution_check(std::uint64_t seed, int count);

struct RunOptions {
  std::filesystem::path out_dir;
  std::uint64_t seed = 1;
};

struct RunOutcome {
  nlohmann::ordered_json manifest;
  std::filesystem::path manifest_path;
  int exit_code = 0;
};

/// Executes a scenario and writes its outputs and manifest.json into
/// opts.out_dir. Library failures are recorded in the manifest and mapped to
/// the exit code instead of propagating; io failures on the output directory
/// propagate.
RunOutcome run(const ScenarioConfig& cfg, const RunOptions& opts);

/// Names accepted by emit_plotdata.
const std::vector<std::string>& plot_quantities();

/// Writes plot_<quantity>.dat next to the manifest and returns its path.
std::filesystem::path emit_plotdata(const std::filesystem::path& manifest, const std::string& quantity);

/// Shortest round-trip decimal form.
std::string format_double(double x);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& p);

}  // namespace mcced
