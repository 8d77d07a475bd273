#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lublock::cli {

/// Runs one command line (without the program name) and returns the exit
/// code: 0 success, 1 numerical failure, 2 usage or parameters, 3 I/O.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lublock::cli
