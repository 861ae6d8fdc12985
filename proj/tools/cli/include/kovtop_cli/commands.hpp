#pragma once

// Subcommands of the kovtop tool and the argument parsing in front of them.
// Exit codes: 0 all pass, 1 check failure, 2 configuration or I/O error,
// 3 numerical failure.

#include <iosfwd>
#include <string>
#include <vector>

#include "kovtop_cli/run_config.hpp"

namespace kovtop::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailure = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
};

int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_transform(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);

// Parses `args` (without the program name) and runs the chosen subcommand.
// `env_seed` is the value of KOVTOP_SEED or null. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, const char* env_seed);

}  // namespace kovtop::cli
