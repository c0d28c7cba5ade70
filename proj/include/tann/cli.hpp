#pragma once

#include <ostream>

namespace tann::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitInternal = 4;

/// Parses and runs one command line. Output directory falls back to
/// $TANN_OUT_DIR, then ./tann-out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tann::cli
