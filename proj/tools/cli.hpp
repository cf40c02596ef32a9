#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace tfz::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kValidationError = 2,
};

/// Fills every field of a manifest with its default and checks names and
/// types. Throws std::invalid_argument on unknown keys or bad values.
nlohmann::json resolve_manifest(const nlohmann::json& manifest);

/// argv-style entry point; args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tfz::cli
