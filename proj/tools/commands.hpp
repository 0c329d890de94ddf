#pragma once

#include <iosfwd>

namespace ttr::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kExitTtr = 0;
inline constexpr int kExitNotTtr = 1;
inline constexpr int kExitUndetermined = 2;
inline constexpr int kExitRank = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

// Parses argv and runs one subcommand. Reports go to `out` unless --out is
// given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ttr::cli
