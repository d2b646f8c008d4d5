#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace refgame::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Entry point of the `refgame` command line: simulate, metrics, extract
/// and serve. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace refgame::cli
