#include "doctest.h"

#include <cmath>
#include <limits>

#include "lpsens/error.hpp"
#include "lpsens/leverage.hpp"
#include "lpsens/regress.hpp"
#include "support.hpp"

using namespace lpsens;

namespace {

Matrix toy() {
  Matrix A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  return A;
}

}  // namespace

TEST_CASE("hyperplane minimization examples") {
  Matrix B(2, 1);
  B << 1, 1;
  Vector a(1);
  a << 1;
  const RegressionSolution one = min_lp_on_hyperplane(B, a, 1.0);
  CHECK(one.status == SolverStatus::Optimal);
  CHECK(one.x_opt(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.value == doctest::Approx(2.0).epsilon(1e-12));

  Vector e1(2);
  e1 << 1, 0;
  const RegressionSolution two = min_lp_on_hyperplane(Matrix::Identity(2, 2), e1, 2.0);
  CHECK(two.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(two.x_opt(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(two.x_opt(1)) <= 1e-12);

  Vector ones(2);
  ones << 1, 1;
  CHECK(min_lp_on_hyperplane(toy(), ones, 1.0).value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("single-row sensitivity examples") {
  Matrix B(2, 1);
  B << 1, 1;
  Vector a(1);
  a << 1;
  CHECK(sensitivity_one(a, B, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sensitivity_one(Vector::Zero(1), B, 1.0) == 0.0);

  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(sensitivity_one(Vector::Unit(3, j), Matrix::Identity(3, 3), p) ==
            doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  // min ||x||_2^2 over x1 + x2 = 1 is 1/2, so the sensitivity is 2; cross-checked
  // against the closed form a^T (B^T B)^+ a.
  Vector ones(2);
  ones << 1, 1;
  const Matrix I2 = Matrix::Identity(2, 2);
  CHECK(sensitivity_one(ones, I2, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ones.dot(pseudoinverse_gram(I2) * ones) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("direction outside the row space is infinite") {
  Matrix B(2, 2);
  B << 1, 0, 2, 0;
  for (double p : {1.0, 1.5, 2.0}) {
    CHECK(sensitivity_one(Vector::Unit(2, 1), B, p) == kInfiniteSensitivity);
  }
}

TEST_CASE("exact sensitivities examples") {
  for (double p : {1.0, 2.0, 3.0}) {
    const WeightVector s = sensitivities_exact(Matrix::Identity(4, 4), p);
    CHECK(s.kind == WeightKind::Sensitivity);
    CHECK(s.sum() == doctest::Approx(4.0).epsilon(1e-6));
  }
  const WeightVector s = sensitivities_exact(toy(), 1.0);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(s[i] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(testing::grid_sensitivity_2d(toy(), i, 1.0, 20000) == doctest::Approx(0.5).epsilon(1e-6));
  }
  CHECK(s.sum() == doctest::Approx(1.5).epsilon(1e-9));

  const Matrix A = testing::gaussian(30, 4, 11);
  const WeightVector s2 = sensitivities_exact(A, 2.0);
  CHECK((s2.values - leverage_exact(A).values).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(s2.sum() == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("agreement with a brute-force direction search, d = 2") {
  const Matrix A = testing::gaussian(12, 2, 12);
  for (double p : {1.0, 1.5, 2.5, 3.0}) {
    const WeightVector s = sensitivities_exact(A, p);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double grid = testing::grid_sensitivity_2d(A, i, p, 20000);
      CHECK(grid <= s[i] * (1.0 + 1e-6));
      CHECK(grid >= s[i] * (1.0 - 1e-4));
    }
  }
}

TEST_CASE("agreement with a brute-force direction search, d = 3") {
  const Matrix A = testing::gaussian(10, 3, 13);
  for (double p : {1.0, 2.5}) {
    const WeightVector s = sensitivities_exact(A, p);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double grid = testing::grid_sensitivity_3d(A, i, p, 300);
      CHECK(grid <= s[i] * (1.0 + 1e-6));
      CHECK(grid >= s[i] * 0.98);
    }
  }
}

TEST_CASE("scale invariance") {
  const Matrix B = testing::gaussian(20, 3, 14);
  const Vector a = testing::gaussian_vector(3, 15);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const double base = sensitivity_one(a, B, p);
    for (double c : {2.0, 0.5, -3.0}) {
      const Vector ca = c * a;
      CHECK(sensitivity_one(ca, B, p) == doctest::Approx(std::pow(std::abs(c), p) * base).epsilon(1e-6));
    }
  }
}

TEST_CASE("appending the row") {
  const Matrix B = testing::gaussian(15, 3, 16);
  const Vector a = testing::gaussian_vector(3, 17);
  for (double p : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    const double outside = sensitivity_one(a, B, p);
    const double inside = sensitivity_one(a, stack_rows(B, a.transpose()), p);
    CHECK(inside == doctest::Approx(1.0 / (1.0 + 1.0 / outside)).epsilon(1e-6));
    CHECK(inside <= 1.0);
  }
}

TEST_CASE("p = 1 solvers agree") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix B = testing::gaussian(30, 4, 100 + seed);
    HyperplaneSolver fast(B, 1.0);
    HyperplaneSolver lp_only(B, 1.0);
    lp_only.set_l1_crossover(false);
    for (Eigen::Index i = 0; i < 5; ++i) {
      const Vector a = B.row(i).transpose();
      const double dual = lp_only.solve(a).value;
      CHECK(fast.solve(a).value == doctest::Approx(dual).epsilon(1e-9));
      CHECK(min_l1_on_hyperplane_primal(B, a).value == doctest::Approx(dual).epsilon(1e-9));
      CHECK(min_lp_on_hyperplane_irls(B, a, 1.0).value == doctest::Approx(dual).epsilon(1e-5));
    }
  }
}

TEST_CASE("optimality of IRLS solutions for p > 1") {
  const Matrix B = testing::gaussian(40, 4, 18);
  const Vector a = testing::gaussian_vector(4, 19);
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const RegressionSolution sol = min_lp_on_hyperplane(B, a, p);
    REQUIRE(sol.status == SolverStatus::Optimal);
    CHECK(a.dot(sol.x_opt) == doctest::Approx(1.0).epsilon(1e-12));
    // Stationarity: the gradient of ||Bx||_p^p is a multiple of a.
    const Vector r = B * sol.x_opt;
    Vector g = Vector::Zero(4);
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      g += p * std::pow(std::abs(r(j)), p - 1.0) * (r(j) > 0 ? 1.0 : -1.0) * B.row(j).transpose();
    }
    const double mu = g.dot(a) / a.squaredNorm();
    CHECK((g - mu * a).norm() <= 1e-6 * g.norm());
    CHECK(mu == doctest::Approx(p * sol.value).epsilon(1e-6));
  }
}

TEST_CASE("serial and parallel exact sensitivities match") {
  const Matrix A = testing::gaussian(60, 4, 20);
  for (double p : {1.0, 1.5, 3.0}) {
    const WeightVector serial = sensitivities_exact(A, p, Execution::Serial);
    const WeightVector parallel = sensitivities_exact(A, p, Execution::Parallel);
    CHECK((serial.values - parallel.values).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("regression errors") {
  const Matrix B = testing::gaussian(10, 2, 21);
  CHECK_THROWS_AS(min_lp_on_hyperplane(B, Vector::Zero(2), 1.0), InputError);
  CHECK_THROWS_AS(min_lp_on_hyperplane(B, Vector::Ones(3), 1.0), InputError);
  CHECK_THROWS_AS(min_lp_on_hyperplane(B, Vector::Ones(2), 0.5), InputError);
  CHECK_THROWS_AS(sensitivities_exact(Matrix::Ones(4, 2), 1.0), RankDeficientError);
  IrlsOptions opts;
  opts.max_iters = 1;
  const RegressionSolution sol = min_lp_on_hyperplane_irls(testing::gaussian(50, 4, 22), Vector::Ones(4), 3.0, opts);
  CHECK(sol.status == SolverStatus::IterLimit);
  CHECK(sol.value > 0.0);
}

TEST_CASE("small rows next to a dominant row stay finite") {
  Matrix B = 0.01 * testing::gaussian(50, 3, 23);
  B.row(49) << 1e3, 0, 0;
  for (double p : {1.0, 1.5, 3.0}) {
    for (Eigen::Index i = 0; i < 49; ++i) {
      const double s = sensitivity_one(B.row(i).transpose(), B, p);
      CHECK(std::isfinite(s));
      CHECK(s <= 1.0);
    }
  }
}
