#pragma once

/// @file cli.hpp
/// Subcommand driver behind the `agentplan` executable.

#include <ostream>
#include <string>
#include <vector>

namespace agentplan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. `args` excludes the program name. Data goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agentplan::cli
