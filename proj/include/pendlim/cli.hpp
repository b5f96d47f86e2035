#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pendlim::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kDomainError = 3,
  kInconclusive = 4,
};

/// Parses args (without the program name), dispatches one command, writes
/// data to `out` (or --out) and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pendlim::cli
