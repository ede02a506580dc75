#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace utilrank {

/// Exit codes: 0 success, 1 user error, 2 system or endpoint error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 1;
inline constexpr int kExitSystem = 2;

/// Entry point for `utilrank <ingest|query|bench|serve|show-run> ...`.
/// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace utilrank
