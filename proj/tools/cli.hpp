#pragma once

#include <iosfwd>

namespace oucap::cli {

/// Process exit codes. Stable; scripts may rely on them.
enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kInvalidFlags = 2,
  kNotConverged = 3,
  kFilterDivergence = 4,
  kResidualCheckFailed = 5,
};

/// Entry point of the `oucap` tool with injectable streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oucap::cli
