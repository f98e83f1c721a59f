#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hsvm::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kNotConverged = 2,
  kIo = 3,
};

// Runs one command line (args excludes the program name) and returns the
// exit code. Normal output goes to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hsvm::cli
