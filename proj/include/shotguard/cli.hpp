#pragma once

#include <iosfwd>

namespace shotguard::cli {

// Exit status contract.
inline constexpr int kExitBenign = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitMalicious = 2;
inline constexpr int kExitUsage = 64;

/// Entry point behind the `shotguard` executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shotguard::cli
