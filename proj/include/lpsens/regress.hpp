#pragma once

#include <limits>

#include "lpsens/matrix.hpp"
#include "lpsens/weights.hpp"

namespace lpsens {

enum class SolverStatus { Optimal, IterLimit };

struct RegressionSolution {
  Vector x_opt;
  double value = 0.0;  // ||B x_opt||_p^p
  SolverStatus status = SolverStatus::Optimal;
  int iterations = 0;
};

struct IrlsOptions {
  double delta_start = 1e-2;  // relative to the largest initial residual
  double delta_end = 1e-10;
  double delta_factor = 0.1;
  int max_iters = 400;        // Newton steps summed over all smoothing stages
};

enum class Execution { Serial, Parallel };

inline constexpr double kInfiniteSensitivity = std::numeric_limits<double>::infinity();

// Solves min ||B x||_p^p subject to a^T x = 1 for many a against one B.
// Construction does the per-B work; solve() is const and safe to call from
// several threads at once.
class HyperplaneSolver {
 public:
  HyperplaneSolver(const Matrix& B, double p, IrlsOptions irls = {});

  RegressionSolution solve(const Eigen::Ref<const Vector>& a) const;

  // sigma^B_p(a) = 1 / min value; 0 for a = 0; kInfiniteSensitivity when the
  // minimum vanishes (a outside the row space of B).
  double sensitivity(const Eigen::Ref<const Vector>& a) const;

  // sensitivity() of every row of `rows`.
  Vector sensitivities(const Matrix& rows, Execution exec = Execution::Parallel) const;

  // p = 1 only: when off, every solve goes through the simplex instead of
  // first trying a certified vertex from the smoothed solution.
  void set_l1_crossover(bool on) { crossover_ = on; }

  double p() const { return p_; }
  const Matrix& matrix() const { return B_; }

 private:
  RegressionSolution solve_l1(const Eigen::Ref<const Vector>& a) const;
  RegressionSolution solve_l2(const Eigen::Ref<const Vector>& a) const;

  Matrix B_;
  double p_;
  IrlsOptions irls_;
  double b_scale_;
  Matrix gram_inverse_;  // p = 2
  bool crossover_ = true;
};

RegressionSolution min_lp_on_hyperplane(const Matrix& B, const Eigen::Ref<const Vector>& a,
                                        double p);

// Smoothed IRLS path for any p >= 1, including p = 1 and p = 2.
RegressionSolution min_lp_on_hyperplane_irls(const Matrix& B, const Eigen::Ref<const Vector>& a,
                                             double p, const IrlsOptions& opts = {});

// p = 1 through the LP  min sum t  s.t.  -t <= B x <= t,  a^T x = 1.
RegressionSolution min_l1_on_hyperplane_primal(const Matrix& B,
                                               const Eigen::Ref<const Vector>& a);

double sensitivity_one(const Eigen::Ref<const Vector>& a, const Matrix& B, double p);

// sigma_p(a_i) with respect to A itself for every row; leverage scores at p = 2.
WeightVector sensitivities_exact(const Matrix& A, double p,
                                 Execution exec = Execution::Parallel);

const char* to_string(SolverStatus status);

}  // namespace lpsens
