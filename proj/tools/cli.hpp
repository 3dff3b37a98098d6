#pragma once

#include <string>
#include <vector>

namespace transit::cli {

// Subcommands: train, eval, sweep, plot, selftest. Exit codes: 0 success,
// 1 runtime failure (one JSON error line on stderr), 2 bad flags.
int run(const std::vector<std::string>& args);

}  // namespace transit::cli
