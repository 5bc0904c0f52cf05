#pragma once

#include <iosfwd>

namespace atfrac {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kSolverFailure = 2, kInvariantViolation = 3 };

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace atfrac
