#pragma once

#include <string>
#include <vector>

/* Configuration-driven command-line front end. The whole run is exposed as
 * a library call so tests can drive it in-process. */

namespace attb::cli {

struct RunResult {
    int exit_code = 0;
    std::string output;
};

/* args excludes the program name. Exit codes: 0 success, 1 invalid
 * config/usage, 2 computation flagged Undetermined under --strict,
 * 3 internal invariant violation. */
RunResult run(const std::vector<std::string>& args);

int main_entry(int argc, char** argv);

}  // namespace attb::cli
