#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcced/error.hpp"
#include "mcced/harness.hpp"

using namespace mcced;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(scenario:
  name: pair
particles:
  - {charge: 1, mass: 50, position: [-1, 0, 0]}
  - {charge: 1, mass: 50, position: [1, 0, 0]}
integrator:
  dt: 0.1
  t_end: 2
)";

std::string parse_message(const std::string& text) {
  try {
    parse_scenario_text(text, "cfg.yaml");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("mcced_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("minimal configuration gets defaults") {
  const ScenarioConfig c = parse_scenario_text(kMinimal, "cfg.yaml");
  CHECK(c.kind == RunKind::trajectory);
  REQUIRE(c.scenario.size() == 2);
  CHECK(c.scenario.topology.mode == CouplingMode::mc_ced);
  CHECK(c.scenario.topology.p == 1.0);
  CHECK(c.scenario.integrator.method == IntegratorMethod::nbody_retarded);
  CHECK(c.scenario.particles[1].position.x() == 1.0);
  CHECK(c.output.stride == 1);
}

TEST_CASE("configuration errors name the line") {
  std::string bad = kMinimal;
  bad += "topology:\n  p: 0\n";
  const std::string m = parse_message(bad);
  CHECK(m.find("cfg.yaml:10") != std::string::npos);
  CHECK(m.find("c-number") != std::string::npos);

  const std::string unknown = parse_message(std::string(kMinimal) + "  stepsize: 3\n");
  CHECK(unknown.find("cfg.yaml:9") != std::string::npos);
  CHECK(unknown.find("stepsize") != std::string::npos);

  const std::string wave = parse_message(std::string(kMinimal) +
                                         "topology:\n  free_field: {kind: plane-wave, amplitude: 1}\n");
  CHECK(wave.find("free field") != std::string::npos);

  const std::string single = parse_message(R"(particles:
  - {charge: 1, mass: 1}
)");
  CHECK(single.find("N ≥ 2") != std::string::npos);

  CHECK_THROWS_AS(parse_scenario_text("particles: [", "x"), Error);
  CHECK_THROWS_AS(parse_scenario("/nonexistent/cfg.yaml"), Error);
}

TEST_CASE("resolved YAML parses back to the same configuration") {
  for (const BuiltinScenario& b : builtin_scenarios()) {
    const ScenarioConfig c = parse_scenario_text(b.yaml, b.name);
    const ScenarioConfig back = parse_scenario_text(to_yaml(c), b.name);
    CHECK_MESSAGE(to_json(c) == to_json(back), b.name);
  }
  CHECK_THROWS_AS(load_scenario("no-such-builtin"), Error);
}

TEST_CASE("format and hashing") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-0.0) == "0");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("static pair run writes its artifacts") {
  const fs::path dir = fresh_dir("static");
  const RunOutcome out = run(load_scenario("static-pair"), {dir, 1});
  CHECK(out.exit_code == 0);
  const auto& m = out.manifest;
  CHECK(m["status"] == "ok");
  CHECK(m["acceptance"]["failed"] == 0);
  CHECK(m["version"] == kArtifactVersion);
  REQUIRE(fs::exists(dir / "manifest.json"));
  for (const auto& o : m["outputs"]) {
    const fs::path f = dir / o["file"].get<std::string>();
    REQUIRE(fs::exists(f));
    CHECK(sha256_file(f) == o["sha256"].get<std::string>());
  }
  const std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("t,particle,x,y,z,ux,uy,uz,ax,ay,az,larmor\n", 0) == 0);

  for (const std::string& q : plot_quantities()) {
    const fs::path p = emit_plotdata(out.manifest_path, q);
    CHECK(fs::file_size(p) > 0);
  }
  try {
    emit_plotdata(out.manifest_path, "entropy");
    FAIL("unknown quantity accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::usage);
  }
  fs::remove_all(dir);
}

TEST_CASE("repeated runs are byte identical") {
  const ScenarioConfig cfg = load_scenario("runaway-demo");
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  const RunOutcome ra = run(cfg, {a, 7});
  const RunOutcome rb = run(cfg, {b, 7});
  for (const char* f : {"trajectory.csv", "ledger.json"})
    CHECK(sha256_file(a / f) == sha256_file(b / f));
  auto strip = [](nlohmann::ordered_json m) {
    m.erase("wall_time");
    return m.dump();
  };
  CHECK(strip(ra.manifest) == strip(rb.manifest));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("runaway is a reported result, not a failure") {
  const fs::path dir = fresh_dir("runaway");
  const RunOutcome out = run(load_scenario("runaway-demo"), {dir, 1});
  CHECK(out.exit_code == 0);
  const std::string ledger = slurp(dir / "ledger.json");
  CHECK(ledger.find("\"runaway\"") != std::string::npos);
  CHECK(ledger.find("\"runaway\": true") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("algebra suite run") {
  const fs::path dir = fresh_dir("algebra");
  const RunOutcome out = run(load_scenario("algebra-suite"), {dir, 1});
  CHECK(out.exit_code == 0);
  CHECK(fs::exists(dir / "checks.txt"));
  fs::remove_all(dir);
}
