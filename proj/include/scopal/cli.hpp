#pragma once

// Command-line front end. Every subcommand writes into its own run directory
// <out>/<subcommand>-<run id>, where the run id hashes the effective config
// and the contents of every input file. The directory is assembled under a
// temporary name and renamed once complete, so an existing run directory is
// never modified; rerunning an identical command reports the existing run.

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace scopal {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name. `env` supplies SCOPAL_* overrides.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::map<std::string, std::string>& env);

}  // namespace scopal
