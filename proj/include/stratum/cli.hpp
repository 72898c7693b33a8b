#pragma once

#include <iosfwd>

namespace stratum {

enum class ExitCode : int {
    ok = 0,
    invalid = 1,     // parse or validation failure, bad arguments
    infeasible = 2,  // no placement, unresolvable model, infeasible plan
    io_error = 3,    // unreadable/unwritable files, malformed JSON inputs
};

/// Entry point behind the `stratum` executable. Machine-readable output goes
/// to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stratum
