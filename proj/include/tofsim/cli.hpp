#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tofsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Batch frontend. `args` excludes the program name. Normal output goes to
/// `out`, diagnostics and usage to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tofsim
