#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sal {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point of the `sal` tool. `args` excludes the program name.
/// Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sal
