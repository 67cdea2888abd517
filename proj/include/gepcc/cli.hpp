#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gepcc::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kDataError = 2,
    kNumericError = 3,
};

/// Runs the command line `args` (without the program name). Data goes to
/// `out`, diagnostics to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gepcc::cli
