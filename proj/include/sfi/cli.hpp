#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sfi {

/// Exit codes of the `sfi` command.
enum ExitStatus : int {
  kExitOk = 0,
  kExitFindings = 1,
  kExitUsage = 2,
  kExitInvariantBreach = 3,
};

/// Runs the command line `args` (without the program name). Data goes to
/// `out`, logs and errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sfi
