#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace weedbot::cli {

enum ExitCode { success = 0, runtime_failure = 1, usage_error = 2 };

/// Parses `args` (without the program name), runs the subcommand and returns
/// the process exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weedbot::cli
