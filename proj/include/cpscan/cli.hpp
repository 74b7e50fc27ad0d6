#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpscan {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,  // argument or validation error
  kExitIo = 3,
};

// Entry point of the `cpscan` tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cpscan
