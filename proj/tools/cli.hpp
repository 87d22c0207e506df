#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brlstm::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (args[0] is the program name). Diagnostics go
/// to `err` as a single line; reports are written under --out.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brlstm::cli
