#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tacan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;

/// Runs one command line (args excludes the program name). Normal output goes
/// to `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tacan::cli
