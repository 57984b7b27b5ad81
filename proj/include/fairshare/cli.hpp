#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fairshare {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitInfeasible = 3, kExitEstimation = 4 };

/// Runs the tool on args (args[0] is the program name). Results go to `out` unless
/// --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairshare
