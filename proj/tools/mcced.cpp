// Command-line front end.
//
//   mcced run <scenario.yaml|builtin> --out DIR [--seed N]
//   mcced list-scenarios [--show NAME]
//   mcced plot <manifest.json> --quantity Q
//   mcced algebra <expr-file>
//   mcced check --suite {fields,dynamics,symmetry,algebra,all}

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mcced/acceptance.hpp"
#include "mcced/algebra_script.hpp"
#include "mcced/harness.hpp"

using namespace mcced;

int main(int argc, char** argv) {
  CLI::App app{"mcced: measurement-color classical electrodynamics experiments"};
  app.require_subcommand(1);

  std::string target, out_dir;
  std::uint64_t seed = 1;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file or built-in scenario");
  run_cmd->add_option("scenario", target, "Scenario file or built-in name")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--seed", seed, "Seed for randomized checks");

  std::string show;
  auto* list_cmd = app.add_subcommand("list-scenarios", "List built-in scenarios");
  list_cmd->add_option("--show", show, "Print the configuration of one built-in");

  std::string manifest, quantity;
  auto* plot_cmd = app.add_subcommand("plot", "Extract plot data from a finished run");
  plot_cmd->add_option("manifest", manifest, "manifest.json of the run")->required();
  plot_cmd->add_option("--quantity", quantity, "Quantity to extract")->required();

  std::string script;
  auto* alg_cmd = app.add_subcommand("algebra", "Evaluate a photon-algebra script");
  alg_cmd->add_option("file", script, "Expression file")->required();

  std::string suite = "all";
  auto* check_cmd = app.add_subcommand("check", "Run acceptance criteria");
  check_cmd->add_option("--suite", suite, "fields, dynamics, symmetry, algebra or all")
      ->check(CLI::IsMember(suite_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCode::usage);
  }

  try {
    if (*run_cmd) {
      const ScenarioConfig cfg = load_scenario(target);
      const RunOutcome out = run(cfg, {out_dir, seed});
      const auto& acc = out.manifest["acceptance"];
      std::cout << cfg.scenario.name << ": " << out.manifest["status"].get<std::string>() << ", "
                << acc["passed"] << " checks passed, " << acc["failed"] << " failed\n";
      for (const auto& c : acc["checks"])
        std::cout << "  " << (c["pass"].get<bool>() ? "PASS" : "FAIL") << "  "
                  << c["name"].get<std::string>() << "  (" << c["detail"].get<std::string>()
                  << ")\n";
      if (!out.manifest["error"].is_null())
        std::cerr << "error (" << out.manifest["error"]["code"].get<std::string>()
                  << "): " << out.manifest["error"]["message"].get<std::string>() << "\n";
      std::cout << "manifest: " << out.manifest_path.string() << "\n";
      return out.exit_code;
    }
    if (*list_cmd) {
      if (!show.empty()) {
        for (const BuiltinScenario& b : builtin_scenarios())
          if (b.name == show) {
            std::cout << b.yaml;
            return 0;
          }
        fail(ErrorCode::usage, "no built-in scenario named '" + show + "'");
      }
      for (const BuiltinScenario& b : builtin_scenarios())
        std::cout << b.name << std::string(b.name.size() < 20 ? 20 - b.name.size() : 1, ' ')
                  << b.description << "\n";
      return 0;
    }
    if (*plot_cmd) {
      std::cout << emit_plotdata(manifest, quantity).string() << "\n";
      return 0;
    }
    if (*alg_cmd) {
      std::ifstream in(script);
      if (!in) fail(ErrorCode::io, "cannot read " + script);
      const algebra::ScriptResult r = algebra::run_algebra_script(in, std::cout);
      std::cout << r.commands << " commands, " << r.assertions << " assertions, " << r.failures
                << " failed\n";
      return r.failures ? 1 : 0;
    }
    if (*check_cmd) {
      const auto results = run_suite(suite, std::cout);
      std::size_t failed = 0;
      for (const auto& r : results) failed += !r.result.pass;
      std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
      return failed ? 1 : 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return static_cast<int>(e.code());
  }
  return 0;
}
