#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace semx::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kRuntimeFailure = 1,  ///< MessageNotUnderstood, UserFailure, DepthExceeded, AOS mismatch
  kUsageError = 2,      ///< bad flags, parse or validation failure, analysis precondition
};

/// Entry point of the `semx` tool. `args` excludes the program name.
/// Subcommands: run, diff, analyze, aos, aos-table.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace semx::cli
