#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpr::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kSchema = 2,
  kPrecondition = 3,
  kPipeline = 4,
};

/// Runs one invocation (arguments without the program name). The report goes
/// to --out, or to `out` when no --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cpr::cli
