#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optsmt {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitParse = 3,
  kExitInterrupted = 4,
  kExitCrosscheckFailed = 5,
};

/// Runs the command line `args` (without the program name), writing
/// regular output to `out` and diagnostics to `err`. Returns the exit code.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Header of the statistics CSV written by `solve --stats` and `bench`.
std::string csv_header();

} // namespace optsmt
