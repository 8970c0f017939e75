#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace taskspace {

inline constexpr const char* kVersion = "1.0.0";

/// Exit codes of run().
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Command-line front end. `args` excludes the program name. Reports go to
/// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace taskspace
