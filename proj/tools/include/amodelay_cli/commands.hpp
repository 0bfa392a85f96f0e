#pragma once

#include <ostream>

namespace amodelay::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Parses the command line and runs one subcommand. Human-readable output
/// goes to `out`, diagnostics to `err`. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace amodelay::cli
