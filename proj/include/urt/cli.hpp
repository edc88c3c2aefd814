#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace urt {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitGuard = 2 };

/// Runs the `urt` command line. args[0] is the program name. Results go to
/// `out`, diagnostics and the seed/config echo to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace urt
