#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace reaper {

// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitConfig = 2, kExitInput = 3 };

// Runs `reaper <args...>` in-process; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reaper
