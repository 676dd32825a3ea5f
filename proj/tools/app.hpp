#pragma once

#include <cstdint>
#include <iosfwd>

#include "lpsens/matrix.hpp"

namespace lpsens::app {

// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitInternal = 3;

// Parses argv (argv[0] is the program name), runs one subcommand, prints the
// summary to `out` and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// n x d matrix whose rows are Gaussian directions scaled by Pareto(1.5)
// magnitudes, used by `bench --synthetic`.
Matrix synthetic_heavy_tailed(Eigen::Index n, Eigen::Index d, std::uint64_t seed);

}  // namespace lpsens::app
