#include "lpsens/regress.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "lpsens/error.hpp"
#include "lpsens/kernels.hpp"
#include "lpsens/leverage.hpp"
#include "lpsens/simplex.hpp"

namespace lpsens {

namespace {

constexpr double kL1HintDelta = 1e-6;

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("p must be a finite real >= 1");
}

// Index of the largest |a_j|, lowest index on ties.
Eigen::Index pivot_index(const Eigen::Ref<const Vector>& a) {
  Eigen::Index k = 0;
  for (Eigen::Index j = 1; j < a.size(); ++j) {
    if (std::abs(a(j)) > std::abs(a(k))) k = j;
  }
  return k;
}

// u^{p/2}. When 2p is a small integer q, u^{q/4} is assembled from u, sqrt(u)
// and sqrt(sqrt(u)), which is much cheaper than exp/log.
double half_power(double u, double p) {
  const double q = 2.0 * p;
  if (q == std::floor(q) && q <= 32.0) {
    const int qi = static_cast<int>(q);
    double out = 1.0;
    for (int k = 0; k < qi / 4; ++k) out *= u;
    if (qi % 4 >= 2) out *= std::sqrt(u);
    if (qi % 2 == 1) out *= std::sqrt(std::sqrt(u));
    return out;
  }
  return std::exp(0.5 * p * std::log(u));
}

struct Smoothed {
  double f = 0.0;
  Vector grad;
  Matrix hess;
};

double smoothed_value(const Vector& r, double p, double delta2) {
  double f = 0.0;
  for (Eigen::Index j = 0; j < r.size(); ++j) f += half_power(r(j) * r(j) + delta2, p);
  return f;
}

// Value, gradient and Newton Hessian of sum_j (r_j^2 + delta^2)^{p/2}
// with r = c + G z.
Smoothed smoothed_terms(const Vector& r, const Matrix& G, double p, double delta2) {
  const Eigen::Index m = r.size();
  Vector gw(m);
  Vector hw(m);
  double f = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double r2 = r(j) * r(j);
    const double u = r2 + delta2;
    const double up = half_power(u, p);
    f += up;
    const double u_pm2 = up / u;          // u^{p/2 - 1}
    gw(j) = p * u_pm2 * r(j);
    hw(j) = p * (u_pm2 / u) * ((p - 1.0) * r2 + delta2);
  }
  Smoothed out;
  out.f = f;
  out.grad = G.transpose() * gw;
  out.hess = G.transpose() * hw.asDiagonal() * G;
  return out;
}

// Tries to certify the vertex of min ||B x||_1 s.t. a^T x = 1 whose d - 1
// zero residuals are the smallest entries of `hint`. The certificate is a
// feasible point of the dual LP with the same objective value.
std::optional<RegressionSolution> certified_l1_vertex(const Matrix& B,
                                                      const Eigen::Ref<const Vector>& a,
                                                      const Vector& hint) {
  const Eigen::Index m = B.rows();
  const Eigen::Index d = B.cols();
  if (m < d - 1) return std::nullopt;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto zeros = static_cast<std::ptrdiff_t>(d - 1);
  std::partial_sort(order.begin(), order.begin() + zeros, order.end(),
                    [&](Eigen::Index i, Eigen::Index j) {
                      const double hi = std::abs(hint(i));
                      const double hj = std::abs(hint(j));
                      return hi < hj || (hi == hj && i < j);
                    });

  Eigen::MatrixXd K(d, d);
  for (Eigen::Index k = 0; k < d - 1; ++k) K.row(k) = B.row(order[static_cast<std::size_t>(k)]);
  K.row(d - 1) = a.transpose();
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (!lu.isInvertible()) return std::nullopt;
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(d);
  unit(d - 1) = 1.0;
  const Vector x = lu.solve(unit);
  const Vector r = B * x;
  const double scale = r.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) return std::nullopt;

  std::vector<bool> in_zero(static_cast<std::size_t>(m), false);
  for (Eigen::Index k = 0; k < d - 1; ++k) in_zero[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < m; ++j) {
    if (in_zero[static_cast<std::size_t>(j)] || std::abs(r(j)) <= 1e-12 * scale) continue;
    g += (r(j) > 0.0 ? 1.0 : -1.0) * B.row(j).transpose();
  }
  // Dual multipliers of the zero rows and mu: B_Z^T y_Z - mu a = -g.
  Eigen::MatrixXd M(d, d);
  M.leftCols(d - 1) = K.topRows(d - 1).transpose();
  M.col(d - 1) = -a;
  const Eigen::FullPivLU<Eigen::MatrixXd> dual(M);
  if (!dual.isInvertible()) return std::nullopt;
  const Eigen::VectorXd v = dual.solve(Eigen::VectorXd(-g));
  if ((M * v + g).norm() > 1e-9 * (1.0 + g.norm())) return std::nullopt;
  const double mu = v(d - 1);
  if (!(mu > 0.0)) return std::nullopt;
  for (Eigen::Index k = 0; k < d - 1; ++k) {
    if (!(std::abs(v(k)) <= 1.0 + 1e-9)) return std::nullopt;
  }
  RegressionSolution sol;
  sol.x_opt = x;
  sol.value = r.cwiseAbs().sum();
  if (std::abs(sol.value - mu) > 1e-8 * (1.0 + sol.value)) return std::nullopt;
  return sol;
}

}  // namespace

namespace {

// Smoothing path shared by the public IRLS solver and the p = 1 vertex search.
// After each smoothing stage, stage_done (if set) sees the current x and may
// end the path early.
RegressionSolution irls_path(const Matrix& B, const Eigen::Ref<const Vector>& a, double p,
                             const IrlsOptions& opts,
                             const std::function<bool(const Vector&)>& stage_done) {
  const Eigen::Index d = B.cols();
  if (a.size() != d) throw InputError("min_lp_on_hyperplane: dimension mismatch");
  if (a.isZero(0.0)) throw InputError("min_lp_on_hyperplane: a must be nonzero");

  // x = e_k / a_k + N z, with N spanning {x : a^T x = 0}; residual r = c + G z.
  const Eigen::Index k = pivot_index(a);
  const Vector c = B.col(k) / a(k);
  Matrix G(B.rows(), d - 1);
  for (Eigen::Index j = 0, col = 0; j < d; ++j) {
    if (j == k) continue;
    G.col(col++) = B.col(j) - B.col(k) * (a(j) / a(k));
  }
  auto to_x = [&](const Vector& z) {
    Vector x(d);
    double dot = 0.0;
    for (Eigen::Index j = 0, col = 0; j < d; ++j) {
      if (j == k) continue;
      x(j) = z(col++);
      dot += a(j) * x(j);
    }
    x(k) = (1.0 - dot) / a(k);
    return x;
  };

  RegressionSolution sol;
  Vector z = Vector::Zero(d - 1);
  if (d > 1) {
    Eigen::MatrixXd g = G;
    z = g.colPivHouseholderQr().solve(Eigen::VectorXd(-c));
  }
  if (d == 1 || p == 2.0) {
    sol.x_opt = to_x(z);
    sol.value = lp_norm_pow(B * sol.x_opt, p);
    return sol;
  }

  Vector r = c + G * z;
  const double scale = r.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    sol.x_opt = to_x(z);
    sol.value = 0.0;
    return sol;
  }

  bool converged = false;
  int iters = 0;
  for (double delta_rel = opts.delta_start;; delta_rel *= opts.delta_factor) {
    const bool last = delta_rel <= opts.delta_end * (1.0 + 1e-9);
    const double delta = delta_rel * scale;
    const double delta2 = delta * delta;
    const double stage_tol = last ? 1e-15 : 1e-9;
    converged = false;
    while (iters < opts.max_iters) {
      ++iters;
      const Smoothed s = smoothed_terms(r, G, p, delta2);
      Matrix H = s.hess;
      H.diagonal().array() += 1e-14 * (H.trace() / static_cast<double>(H.rows()) + 1e-300);
      const Vector step = -Eigen::MatrixXd(H).ldlt().solve(Eigen::VectorXd(s.grad));
      const double decrement = -s.grad.dot(step);
      if (!(decrement > stage_tol * s.f)) {
        converged = true;
        break;
      }
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        const Vector z_try = z + t * step;
        const Vector r_try = c + G * z_try;
        const double f_try = smoothed_value(r_try, p, delta2);
        if (f_try <= s.f - 1e-4 * t * decrement) {
          z = z_try;
          r = r_try;
          moved = true;
          break;
        }
      }
      if (!moved) {
        converged = true;
        break;
      }
    }
    if (stage_done && stage_done(to_x(z))) break;
    if (last || iters >= opts.max_iters) break;
  }

  sol.x_opt = to_x(z);
  sol.value = lp_norm_pow(B * sol.x_opt, p);
  sol.iterations = iters;
  sol.status = converged ? SolverStatus::Optimal : SolverStatus::IterLimit;
  return sol;
}

}  // namespace

RegressionSolution min_lp_on_hyperplane_irls(const Matrix& B, const Eigen::Ref<const Vector>& a,
                                             double p, const IrlsOptions& opts) {
  check_p(p);
  return irls_path(B, a, p, opts, nullptr);
}

RegressionSolution min_l1_on_hyperplane_primal(const Matrix& B,
                                               const Eigen::Ref<const Vector>& a) {
  const Eigen::Index m = B.rows();
  const Eigen::Index d = B.cols();
  if (a.size() != d) throw InputError("min_lp_on_hyperplane: dimension mismatch");
  // Variables: x+ (d), x- (d), t (m), s1 (m), s2 (m), all nonnegative.
  //   B x - t + s1 = 0,  -B x - t + s2 = 0,  a^T x = 1.
  const Eigen::Index nv = 2 * d + 3 * m;
  LinearProgram lp;
  lp.A = Matrix::Zero(2 * m + 1, nv);
  lp.A.block(0, 0, m, d) = B;
  lp.A.block(0, d, m, d) = -B;
  lp.A.block(0, 2 * d, m, m) = -Matrix::Identity(m, m);
  lp.A.block(0, 2 * d + m, m, m) = Matrix::Identity(m, m);
  lp.A.block(m, 0, m, d) = -B;
  lp.A.block(m, d, m, d) = B;
  lp.A.block(m, 2 * d, m, m) = -Matrix::Identity(m, m);
  lp.A.block(m, 2 * d + 2 * m, m, m) = Matrix::Identity(m, m);
  lp.A.block(2 * m, 0, 1, d) = a.transpose();
  lp.A.block(2 * m, d, 1, d) = -a.transpose();
  lp.b = Vector::Zero(2 * m + 1);
  lp.b(2 * m) = 1.0;
  lp.c = Vector::Zero(nv);
  lp.c.segment(2 * d, m).setOnes();
  lp.lower = Vector::Zero(nv);
  lp.upper = Vector::Constant(nv, std::numeric_limits<double>::infinity());

  const LpResult res = solve_lp(lp);
  RegressionSolution sol;
  sol.iterations = res.iterations;
  if (res.status == LpStatus::Infeasible) {
    sol.x_opt = Vector::Zero(d);
    sol.value = 0.0;
    return sol;
  }
  if (res.status != LpStatus::Optimal) {
    throw NonConvergenceError(std::string("primal l1 LP ended with status ") +
                                  to_string(res.status),
                              0.0);
  }
  sol.x_opt = res.x.head(d) - res.x.segment(d, d);
  sol.value = lp_norm_pow(B * sol.x_opt, 1.0);
  return sol;
}

HyperplaneSolver::HyperplaneSolver(const Matrix& B, double p, IrlsOptions irls)
    : B_(B), p_(p), irls_(irls) {
  check_p(p);
  validate(B);
  b_scale_ = B_.norm();
  if (p_ == 2.0) gram_inverse_ = pseudoinverse_gram(B_);
}

RegressionSolution HyperplaneSolver::solve_l2(const Eigen::Ref<const Vector>& a) const {
  RegressionSolution sol;
  const Vector y = gram_inverse_ * a;
  const double q = a.dot(y);
  if (!(q > 0.0)) {
    sol.x_opt = Vector::Zero(a.size());
    sol.value = 0.0;
    return sol;
  }
  sol.x_opt = y / q;
  sol.value = (B_ * sol.x_opt).squaredNorm();
  return sol;
}

// A smoothed solve suggests the optimal vertex, which is accepted only with a
// dual certificate. Otherwise the LP dual is solved by simplex:
//   max mu  s.t.  B^T y = mu a,  -1 <= y <= 1,
// whose multipliers on the equality rows are the primal minimizer.
RegressionSolution HyperplaneSolver::solve_l1(const Eigen::Ref<const Vector>& a) const {
  const Eigen::Index m = B_.rows();
  const Eigen::Index d = B_.cols();
  IrlsOptions hint_opts = irls_;
  hint_opts.delta_end = std::max(irls_.delta_end, kL1HintDelta);
  Vector residual;
  std::optional<RegressionSolution> certified;
  const RegressionSolution path = irls_path(B_, a, 1.0, hint_opts, [&](const Vector& x) {
    residual = B_ * x;
    if (crossover_) certified = certified_l1_vertex(B_, a, residual);
    return certified.has_value();
  });
  if (certified) return *certified;
  // No smoothing stage ran: d = 1 or a zero residual, both solved exactly.
  if (residual.size() == 0) return path;
  LinearProgram lp;
  lp.A.resize(d, m + 1);
  lp.A.leftCols(m) = B_.transpose();
  lp.A.col(m) = -a;
  lp.b = Vector::Zero(d);
  lp.c = Vector::Zero(m + 1);
  lp.c(m) = -1.0;
  lp.lower = Vector::Constant(m + 1, -1.0);
  lp.lower(m) = 0.0;
  lp.upper = Vector::Ones(m + 1);
  lp.upper(m) = std::numeric_limits<double>::infinity();
  lp.start_at_upper.assign(static_cast<std::size_t>(m + 1), false);
  for (Eigen::Index j = 0; j < m; ++j) {
    lp.start_at_upper[static_cast<std::size_t>(j)] = residual(j) > 0.0;
  }
  LpOptions opts;
  opts.pricing = Pricing::Dantzig;
  const LpResult res = solve_lp(lp, opts);
  if (res.status != LpStatus::Optimal) {
    throw NonConvergenceError(std::string("l1 hyperplane LP ended with status ") +
                                  to_string(res.status),
                              0.0);
  }
  RegressionSolution sol;
  sol.iterations = res.iterations;
  const double mu = -res.objective;
  const double dot = a.dot(res.duals);
  if (!(mu > 0.0) || !(std::abs(dot) > 0.0)) {
    sol.x_opt = Vector::Zero(d);
    sol.value = 0.0;
    return sol;
  }
  sol.x_opt = res.duals / dot;
  sol.value = lp_norm_pow(B_ * sol.x_opt, 1.0);
  if (std::abs(sol.value - mu) > 1e-7 * (1.0 + mu)) sol.status = SolverStatus::IterLimit;
  return sol;
}

RegressionSolution HyperplaneSolver::solve(const Eigen::Ref<const Vector>& a) const {
  if (a.size() != B_.cols()) throw InputError("min_lp_on_hyperplane: dimension mismatch");
  if (a.isZero(0.0)) throw InputError("min_lp_on_hyperplane: a must be nonzero");
  if (p_ == 1.0) return solve_l1(a);
  if (p_ == 2.0) return solve_l2(a);
  return min_lp_on_hyperplane_irls(B_, a, p_, irls_);
}

double HyperplaneSolver::sensitivity(const Eigen::Ref<const Vector>& a) const {
  if (a.isZero(0.0)) return 0.0;
  const RegressionSolution sol = solve(a);
  // a is outside the row space when the minimizer is numerically a null
  // vector of B.
  const double floor = kRankTolerance * b_scale_ * sol.x_opt.norm();
  if (!(std::pow(sol.value, 1.0 / p_) > floor)) return kInfiniteSensitivity;
  return 1.0 / sol.value;
}

Vector HyperplaneSolver::sensitivities(const Matrix& rows, Execution exec) const {
  Vector out(rows.rows());
  parallel_for(static_cast<std::size_t>(rows.rows()), exec, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    out(row) = sensitivity(rows.row(row).transpose());
  });
  return out;
}

RegressionSolution min_lp_on_hyperplane(const Matrix& B, const Eigen::Ref<const Vector>& a,
                                        double p) {
  return HyperplaneSolver(B, p).solve(a);
}

double sensitivity_one(const Eigen::Ref<const Vector>& a, const Matrix& B, double p) {
  return HyperplaneSolver(B, p).sensitivity(a);
}

WeightVector sensitivities_exact(const Matrix& A, double p, Execution exec) {
  check_p(p);
  require_full_column_rank(A);
  WeightVector out;
  out.kind = WeightKind::Sensitivity;
  out.p = p;
  if (p == 2.0) {
    out.values = leverage_exact(A).values;
    return out;
  }
  out.values = HyperplaneSolver(A, p).sensitivities(A, exec);
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    out.values(i) = std::min(1.0, out.values(i));
  }
  return out;
}

const char* to_string(SolverStatus status) {
  return status == SolverStatus::Optimal ? "optimal" : "iteration_limit";
}

}  // namespace lpsens
