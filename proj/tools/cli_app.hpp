#pragma once

// The `qsm` command-line front end, kept as a library so that tests can run
// it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace qsm::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kNonConvergence = 3,
  kOracleMismatch = 4,
};

/// Runs one command line (without the program name). Tables go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsm::cli
