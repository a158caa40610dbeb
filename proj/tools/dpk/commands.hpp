#pragma once

#include "output.hpp"

namespace dpk::cli {

/// Runs a normalized config. Library exceptions propagate unchanged.
Table run_command(const RunConfig& config);

}  // namespace dpk::cli
