#include "lpsens/reduce.hpp"

#include <cmath>

#include "lpsens/error.hpp"
#include "lpsens/kernels.hpp"

namespace lpsens {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be positive");
}

}  // namespace

RegressionReduction regression_via_sensitivity(const Matrix& A, const Vector& b, double p,
                                               double lambda) {
  validate(A);
  check_lambda(lambda);
  if (b.size() != A.rows()) throw InputError("regression: b length must equal the row count");
  if (!b.allFinite()) throw InputError("regression: b has non-finite entries");
  require_full_column_rank(A);
  const Eigen::Index n = A.rows();
  const Eigen::Index d = A.cols();

  Matrix aug = Matrix::Zero(n + 1, d + 1);
  aug.topLeftCorner(n, d) = A;
  aug.col(d).head(n) = -b;
  aug(n, d) = -lambda;
  const Vector last = aug.row(n).transpose();

  const HyperplaneSolver solver(aug, p);
  const RegressionSolution sol = solver.solve(last);
  if (sol.status != SolverStatus::Optimal) {
    throw NonConvergenceError("regression: hyperplane solve did not converge", sol.value);
  }
  if (!(sol.value > 0.0) || !std::isfinite(sol.value)) {
    throw InputError("regression: sensitivity of the appended row is not positive");
  }
  // The constraint fixes x_{d+1} = -1/lambda, so x_{1..d} = -y/lambda.
  const double lp = std::pow(lambda, p);
  RegressionReduction out;
  out.sensitivity = 1.0 / sol.value;
  out.opt = std::max(0.0, lp * (sol.value - 1.0));
  out.y = -lambda * sol.x_opt.head(d);
  return out;
}

Vector leave_one_out_multiregression(const Matrix& A, double p, double lambda, Execution exec) {
  validate(A);
  check_lambda(lambda);
  const Eigen::Index n = A.rows();
  const Eigen::Index d = A.cols();

  Matrix aug(n + d, d);
  aug.topRows(n) = A;
  aug.bottomRows(d) = lambda * Matrix::Identity(d, d);
  const HyperplaneSolver solver(aug, p);
  const double lp = std::pow(lambda, p);

  Vector out(d);
  std::vector<int> failed(static_cast<std::size_t>(d), 0);
  parallel_for(static_cast<std::size_t>(d), exec, [&](std::size_t i) {
    const auto k = static_cast<Eigen::Index>(i);
    const RegressionSolution sol = solver.solve(aug.row(n + k).transpose());
    failed[i] = sol.status != SolverStatus::Optimal;
    out(k) = lp * sol.value;
  });
  for (int f : failed) {
    if (f) throw NonConvergenceError("leave-one-out: hyperplane solve did not converge", 0.0);
  }
  return out;
}

double default_lambda(const Matrix& A) {
  return 1e-2 * A.norm() / std::sqrt(static_cast<double>(A.rows() * A.cols()));
}

}  // namespace lpsens
