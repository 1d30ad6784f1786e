#pragma once

#include "config.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gflow::cli {

struct RunResult {
  /// File name relative to the output directory, and its content.
  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;
};

/// Runs a resolved configuration without touching the file system.
/// InvalidInput and NumericalFailure propagate.
RunResult run_command(const Json& cfg);

} // namespace gflow::cli
