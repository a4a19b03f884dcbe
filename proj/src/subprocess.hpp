#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace shotguard::detail {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};

// Spawns argv[0] (PATH lookup) with stdin closed and both output streams
// captured. A child still running at the deadline is killed and reported with
// timed_out set. Throws std::system_error when the process cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv,
                          std::chrono::milliseconds timeout);

}  // namespace shotguard::detail
