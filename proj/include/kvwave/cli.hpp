#pragma once

#include <ostream>

namespace kvwave {

/// Exit codes of the command line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_config = 1,
  exit_diverged = 2,
  exit_io = 3,
};

/// Entry point of the `kvwave` tool, with streams injectable for tests.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kvwave
