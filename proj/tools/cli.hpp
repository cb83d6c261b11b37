#pragma once

#include <ostream>

namespace schwinger::cli {

// Exit codes of the command-line tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitPrecision = 3;

/// Whole command line in, exit code out. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace schwinger::cli
