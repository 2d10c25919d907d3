// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any
// criterion fails.

#include <iostream>

#include "mcced/acceptance.hpp"

int main() {
  const auto results = mcced::run_suite("all", std::cout);
  std::size_t failed = 0;
  for (const auto& r : results) failed += !r.result.pass;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
