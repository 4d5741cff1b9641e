#pragma once

#include <iosfwd>

namespace markov_uq::cli {

enum ExitCode : int {
  kOk = 0,
  kModelError = 2,
  kNumericError = 3,
  kNoMethod = 4,
  kValidationFail = 5,
  kValidationInconclusive = 6,
};

/// Entry point of the markov-uq tool. Reports go to `out` (or --out), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace markov_uq::cli
