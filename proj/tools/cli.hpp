#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace popproto::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kExplosion = 3 };

/// Runs one command line (program name excluded). "--builtin X" anywhere is
/// shorthand for the positional or option value "builtin:X".
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace popproto::cli
