#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

namespace kitbench::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitModel = 3,
};

/// "start:stop:steps" (inclusive, evenly spaced) or a comma list.
/// Throws ConfigError on an empty or malformed expression.
std::vector<double> parse_grid(std::string_view expr);

/// Entry point for the kitbench tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kitbench::cli
