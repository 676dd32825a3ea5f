#pragma once

#include "lpsens/matrix.hpp"
#include "lpsens/regress.hpp"

namespace lpsens {

struct RegressionReduction {
  double opt = 0.0;          // lambda^p / sigma - lambda^p
  double sensitivity = 0.0;  // sigma of the appended row [0, -lambda]
  Vector y;                  // minimizer of ||A y - b||_p recovered from the solve
};

// min_y ||A y - b||_p^p from the sensitivity of the last row of
// A' = [A, -b; 0, -lambda].
RegressionReduction regression_via_sensitivity(const Matrix& A, const Vector& b, double p,
                                               double lambda);

// Entry i is lambda^p / sigma_p of row n + i of A' = [A; lambda I], which
// brackets min_y ||A_{:-i} y + A_{:i}||_p^p from above within
// lambda^p (1 + ||y*||_p^p). A itself may be rank deficient; the identity
// block keeps A' full rank.
Vector leave_one_out_multiregression(const Matrix& A, double p, double lambda,
                                     Execution exec = Execution::Parallel);

// 1e-2 ||A||_F / sqrt(n d).
double default_lambda(const Matrix& A);

}  // namespace lpsens
