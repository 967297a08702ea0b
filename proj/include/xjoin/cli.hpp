#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace xjoin {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitIo = 3,
};

/*
 * Entry point of the `xjoin` tool. `args` excludes the program name.
 * Subcommands: gen, validate, index, query, bench, cost.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xjoin
