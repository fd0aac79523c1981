#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace manifold_descent::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitDivergence = 2,
  kExitCheckFailed = 3,
};

/// Parses argv (subcommand first) and runs it. Messages go to `out`/`err`;
/// result files go to the output directory.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace manifold_descent::cli
