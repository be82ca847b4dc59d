#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ggf {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad flags, invalid parameters
  kExitData = 2,      // unreadable, malformed or inconsistent data
  kExitResource = 3,  // memory or size budget exceeded
};

// Runs one command. `args` excludes the program name:
//   {"run", "--dataset", "data/Mafengwo", "--out", "runs/a"}
// Messages go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ggf
