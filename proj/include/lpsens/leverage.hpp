#pragma once

#include "lpsens/matrix.hpp"
#include "lpsens/random.hpp"
#include "lpsens/weights.hpp"

namespace lpsens {

// tau_i = a_i^T (A^T A)^+ a_i, from the orthonormal basis of a pivoted QR.
WeightVector leverage_exact(const Matrix& A);

// Rows of a Gaussian sketch used by leverage_approx for an (n, d, eps) input.
Eigen::Index leverage_sketch_rows(Eigen::Index n, Eigen::Index d, double eps);

// tau~_i = ||a_i R^{-1}||^2 where R comes from a QR of G A with G Gaussian.
WeightVector leverage_approx(const Matrix& A, double eps, const RandomSource& rng);

}  // namespace lpsens
