#pragma once

#include <string>
#include <vector>

namespace dcu::cli {

// Runs the command-line tool on args (without the program name) and returns
// the process exit code: 0 success, 1 domain error, 2 usage error.
// Reports are JSON on stdout (or --out); progress goes to stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace dcu::cli
