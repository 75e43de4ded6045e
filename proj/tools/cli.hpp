#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dnflow::cli {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kOk = 0,
  kGradientCheckFailed = 1,
  kInputError = 2,
  kStateBlowup = 3,
  kInfeasibleStart = 4,
};

/// Runs the front end on the arguments after the program name.
/// Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dnflow::cli
