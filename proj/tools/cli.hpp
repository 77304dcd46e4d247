#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace act::cli {

// Exit codes of `run`.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // negative verdict or computational error
inline constexpr int kUsage = 2;

/// Runs one command line (without the program name). Machine-readable
/// results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace act::cli
