#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmdist::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kSuccess = 0,
    kInternalError = 1,
    kInputError = 2,
    kNumericalError = 3,
};

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmdist::cli
