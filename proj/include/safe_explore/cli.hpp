#pragma once

#include <ostream>

namespace safe_explore {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitIncomplete = 2;

/// Subcommands: bandit, grid, corridor, oracle, validate. Returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace safe_explore
