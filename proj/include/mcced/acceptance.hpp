#pragma once

// The numbered acceptance criteria, grouped into suites
// fields / dynamics / symmetry / algebra (and all).

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcced/harness.hpp"

namespace mcced {

struct Criterion {
  int id;
  std::string suite;
  std::string title;
  std::function<CheckResult()> run;
};

const std::vector<Criterion>& acceptance_criteria();

const std::vector<std::string>& suite_names();

struct CriterionOutcome {
  int id;
  CheckResult result;
  double seconds;
};

/// Runs the criteria of a suite, printing one PASS/FAIL line per criterion
/// to `out` as each finishes. Unknown suite names are usage errors.
std::vector<CriterionOutcome> run_suite(const std::string& suite, std::ostream& out);

/// Byte comparison of two runs of every built-in scenario.
CheckResult determinism_check();

}  // namespace mcced
