#pragma once

#include <ostream>

namespace tfsm::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInvalidInput = 2,
  kTransport = 3,
  kVerdictFailure = 4,
};

/// Entry point of the `tfsm` command; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tfsm::cli
