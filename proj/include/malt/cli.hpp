#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace malt {

// Runs one workbench command (args exclude the program name) and writes the
// machine-readable report to `out` and diagnostics to `err`. Exit codes:
//   0 success, 1 negative result, 2 inconclusive or out of budget,
//   3 usage error or unreadable input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace malt
