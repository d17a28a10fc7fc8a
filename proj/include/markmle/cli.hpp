#pragma once

#include <iosfwd>

namespace markmle::cli {

// Exit codes of the command-line interface.
enum ExitCode : int { Ok = 0, Usage = 1, Parse = 2, Invariant = 3, Numeric = 4 };

/// Runs one command (fit, limit, check, repair, simulate). Report text goes
/// to out, diagnostics to err; data files are written to the given paths.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace markmle::cli
