#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "lpsens/matrix.hpp"
#include "lpsens/random.hpp"

namespace testing {

using lpsens::Matrix;
using lpsens::Vector;

inline Matrix gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  lpsens::Engine eng = lpsens::RandomSource(seed, 99).engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) A(i, j) = normal(eng);
  }
  return A;
}

inline Vector gaussian_vector(Eigen::Index n, std::uint64_t seed) {
  return gaussian(n, 1, seed).col(0);
}

// I_d repeated k times.
inline Matrix identity_stack(Eigen::Index d, Eigen::Index k) {
  Matrix A(d * k, d);
  for (Eigen::Index b = 0; b < k; ++b) A.middleRows(b * d, d) = Matrix::Identity(d, d);
  return A;
}

// Every row of A repeated k times, copies adjacent.
inline Matrix replicate_rows(const Matrix& A, Eigen::Index k) {
  Matrix out(A.rows() * k, A.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index c = 0; c < k; ++c) out.row(i * k + c) = A.row(i);
  }
  return out;
}

inline double ratio_at(const Matrix& A, Eigen::Index i, const Vector& x, double p) {
  const Vector r = A * x;
  double total = 0.0;
  for (Eigen::Index j = 0; j < r.size(); ++j) total += std::pow(std::abs(r(j)), p);
  return std::pow(std::abs(r(i)), p) / total;
}

// max over a uniform angular grid of |a_i^T x|^p / ||A x||_p^p, d = 2.
inline double grid_sensitivity_2d(const Matrix& A, Eigen::Index i, double p, int steps) {
  double best = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double t = M_PI * k / steps;
    Vector x(2);
    x << std::cos(t), std::sin(t);
    best = std::max(best, ratio_at(A, i, x, p));
  }
  return best;
}

// Same on a latitude-longitude grid of the half sphere, d = 3.
inline double grid_sensitivity_3d(const Matrix& A, Eigen::Index i, double p, int steps) {
  double best = 0.0;
  for (int a = 0; a <= steps; ++a) {
    const double phi = M_PI * a / steps;
    for (int b = 0; b < 2 * steps; ++b) {
      const double theta = M_PI * b / steps;
      Vector x(3);
      x << std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi);
      best = std::max(best, ratio_at(A, i, x, p));
    }
  }
  return best;
}

}  // namespace testing
