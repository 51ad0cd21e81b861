#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bilevel {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_infeasible = 2,
  exit_solver = 3,
  exit_golden = 4,
};

/**
 * bilevel <command> ...
 *
 *   reproduce case1|case2   regenerate the reference tables and check them
 *   diagnose <file> --x ..  diagnostics at one leader decision
 *   frontier <file>         robustness/efficiency frontier
 *   replay <manifest.json>  rerun a previous invocation from its manifest
 *
 * `args` excludes the program name.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bilevel
