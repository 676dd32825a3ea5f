#pragma once

#include <vector>

#include "lpsens/matrix.hpp"

namespace lpsens {

// minimize c^T x  subject to  A x = b,  lower <= x <= upper.
// Lower bounds must be finite; upper bounds may be +infinity.
struct LinearProgram {
  Matrix A;
  Vector b;
  Vector c;
  Vector lower;
  Vector upper;
  // Optional starting bound per variable (true = start at upper); empty means
  // every variable starts at its lower bound.
  std::vector<bool> start_at_upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpResult {
  LpStatus status = LpStatus::IterLimit;
  Vector x;
  double objective = 0.0;
  Vector duals;  // c - A^T duals is the reduced-cost vector at the optimum
  int iterations = 0;
};

// Bland: lowest-index eligible column. Dantzig: largest reduced cost, with a
// switch to Bland's rule after a run of degenerate pivots.
enum class Pricing { Bland, Dantzig };

struct LpOptions {
  int max_iters = 0;  // <= 0 selects a size-based default
  Pricing pricing = Pricing::Bland;
};

// Dense tableau, bounded-variable, two-phase primal simplex.
LpResult solve_lp(const LinearProgram& lp, LpOptions opts = {});

const char* to_string(LpStatus status);

}  // namespace lpsens
