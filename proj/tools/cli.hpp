#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zest::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

/// Parses argv (program name first), dispatches one subcommand and returns
/// the process exit code. Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace zest::cli
