#pragma once

#include <iosfwd>

namespace hjnet {

/// Exit codes of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_numeric = 1, exit_config = 2, exit_io = 3 };

/// Full CLI entry point; `out` gets the summary, `err` the diagnostics.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hjnet
