#pragma once

// Text format for algebra checks.
//
//   N 3                              color count (default 2)
//   COMM alpha(1) ; alphad(1) => 3/2
//   APPLY H*alphad(2) => alphad(2)
//   NORM alphad(0) => -3/2
//   PARITY alphad(1)*alphad(2) => +1
//   SUBSIDIARY alphad(1) ; 1,0,0,1 => true
//
// Expressions combine rational literals (3, -1/2) and generators
//   a(k,mu) ad(k,mu) alpha(mu) alphad(mu) arad(k,mu) aradd(k,mu) H H(omega)
// with +, -, * and parentheses. "=> expected" turns a command into an
// assertion. Lines starting with '#' are comments.

#include <iosfwd>
#include <string>

#include "mcced/photon_algebra.hpp"

namespace mcced::algebra {

/// Parses an expression for N colors; throws Error(parse) on bad input.
Polynomial parse_expression(const std::string& text, int N);

struct ScriptResult {
  int commands = 0;
  int assertions = 0;
  int failures = 0;
};

/// Runs a script, writing one line per command to `out`.
ScriptResult run_algebra_script(std::istream& in, std::ostream& out);

}  // namespace mcced::algebra
