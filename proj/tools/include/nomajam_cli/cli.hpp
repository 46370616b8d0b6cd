#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nomajam::cli {

/// Process exit codes. Scripts gate on these, so they never change meaning.
enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kQueueUnstable = 3,
  kInfeasible = 4,
  kValidationFailed = 5,
};

/// Runs the tool on `args` (without the program name). Normal output goes to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nomajam::cli
