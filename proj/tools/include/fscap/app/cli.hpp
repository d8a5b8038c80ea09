#pragma once

#include <ostream>

namespace fscap::app {

/// Exit codes of every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< computation failed, a check did not pass
inline constexpr int kExitUsage = 2;    ///< bad flags or malformed input

/// Entry point of the fscap tool; `out` receives results, `err` diagnostics.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fscap::app
