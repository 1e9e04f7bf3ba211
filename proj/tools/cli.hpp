#pragma once

// Command-line front end. Kept in a library so tests can drive it in-process.

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace madam::cli {

/// Environment lookup; returns nullopt for unset variables.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();

/// Runs one invocation. `args` excludes the program name. Returns the exit
/// status: 0 on success, 2 on configuration errors, 1 on runtime failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_env());

}  // namespace madam::cli
