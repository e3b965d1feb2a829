#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lmap {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitDegenerate = 2,
  kExitService = 3,
};

/// Entry point behind the `lmap` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lmap
