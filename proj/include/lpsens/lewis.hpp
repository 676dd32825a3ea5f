#pragma once

#include <optional>

#include "lpsens/matrix.hpp"
#include "lpsens/weights.hpp"

namespace lpsens {

struct LewisConfig {
  double p = 1.0;
  int max_iters = 200;
  double tol = 1e-6;
  std::optional<double> damping;  // defaults to default_lewis_damping(p)
};

struct LewisResult {
  WeightVector weights;
  int iterations = 0;
  double residual = 0.0;
};

double default_lewis_damping(double p);

// max_i |w_i - tau_i(W^{1/2-1/p} A)| / max(w_i, 1e-12)
double lewis_residual(const Matrix& A, const Vector& w, double p);

// Damped fixed-point iteration from w = d/n. Throws NonConvergenceError when
// the residual is still above tol after max_iters.
LewisResult lewis_weights_detailed(const Matrix& A, const LewisConfig& cfg);

WeightVector lewis_weights(const Matrix& A, const LewisConfig& cfg);

// Same iteration started from a caller-provided w and without a rank check.
LewisResult lewis_iterate(const Matrix& A, const LewisConfig& cfg, Vector w);

}  // namespace lpsens
