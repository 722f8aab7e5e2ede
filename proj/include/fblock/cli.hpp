#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fblock {

/// Entry point of the `fblock` command. `args` excludes the program name.
/// Returns the process exit status: 0 success, 1 a verification failed,
/// 2 invalid input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fblock
