#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // validation failure or a semantic compile error
inline constexpr int kExitUsage = 2;   // bad arguments, unreadable input, or a parse error

/// Runs one command. `args` excludes the program name. Artifacts go to `out`, diagnostics to
/// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sg::cli
