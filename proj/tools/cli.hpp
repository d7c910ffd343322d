// Command-line front end. `run_cli` holds the whole program so that tests can
// drive it without spawning processes.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hkb::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_input = 2,
    exit_resource = 3,
    exit_inconsistent = 4,
};

/// args[0] is the program name, as in argv.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hkb::cli
