#pragma once

#include <string>
#include <vector>

namespace racf::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kRuntimeError = 3 };

/// Parses `args` (without the program name) and dispatches to a subcommand.
/// Messages go to stdout / stderr; the return value is the exit status.
int run(const std::vector<std::string>& args);

}  // namespace racf::cli
