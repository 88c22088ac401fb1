#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tightclass::cli {

/// Process exit statuses.
enum ExitCode : int {
  kOk = 0,
  kParse = 2,
  kNumerical = 3,
  kSweepAbort = 4,
  kPropertyViolation = 5,
};

/// Runs the command line front end. args[0] is the program name.
/// Subcommands: tighten, certify, analyze, simulate, check.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tightclass::cli
