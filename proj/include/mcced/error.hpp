#pragma once

#include <stdexcept>
#include <string>

namespace mcced {

/// Failure categories surfaced by the library. The CLI maps each one to a
/// distinct process exit code.
enum class ErrorCode {
  domain = 2,
  usage = 3,
  horizon = 4,
  singularity = 5,
  numerical_limit = 6,
  convergence = 7,
  parse = 8,
  io = 9,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mcced
