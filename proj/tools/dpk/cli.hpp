#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dpk::cli {

enum ExitCode { kSuccess = 0, kUserError = 1, kNumericalFailure = 2 };

/// Parses arguments (without the program name), runs the command and writes its output to
/// `out` or atomically to the configured path. Diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpk::cli
