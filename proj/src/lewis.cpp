#include "lpsens/lewis.hpp"

#include <cmath>

#include "lpsens/error.hpp"
#include "lpsens/leverage.hpp"

namespace lpsens {

namespace {

constexpr double kFloor = 1e-12;

Vector scaled_leverage(const Matrix& A, const Vector& w, double p) {
  const double exponent = 0.5 - 1.0 / p;
  Matrix scaled = A;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    scaled.row(i) *= std::pow(std::max(w(i), kFloor), exponent);
  }
  return leverage_exact(scaled).values;
}

double residual_of(const Vector& w, const Vector& tau) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    worst = std::max(worst, std::abs(w(i) - tau(i)) / std::max(w(i), kFloor));
  }
  return worst;
}

}  // namespace

double default_lewis_damping(double p) {
  if (p >= 4.0) return 0.5;
  return std::min(1.0, 2.0 * p / (p + 2.0));
}

double lewis_residual(const Matrix& A, const Vector& w, double p) {
  return residual_of(w, scaled_leverage(A, w, p));
}

LewisResult lewis_iterate(const Matrix& A, const LewisConfig& cfg, Vector w) {
  if (!(cfg.p >= 1.0) || !std::isfinite(cfg.p)) throw InputError("lewis: p must be >= 1");
  if (cfg.max_iters < 1) throw InputError("lewis: max_iters must be >= 1");
  if (!(cfg.tol > 0.0)) throw InputError("lewis: tol must be positive");
  const double beta = cfg.damping.value_or(default_lewis_damping(cfg.p));
  if (!(beta > 0.0 && beta <= 1.0)) throw InputError("lewis: damping must lie in (0, 1]");

  LewisResult out;
  out.weights.kind = WeightKind::Lewis;
  out.weights.p = cfg.p;
  Vector tau = scaled_leverage(A, w, cfg.p);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double wi = std::max(w(i), kFloor);
      const double ti = std::max(tau(i), kFloor);
      w(i) = beta == 1.0 ? ti : std::pow(wi, 1.0 - beta) * std::pow(ti, beta);
    }
    tau = scaled_leverage(A, w, cfg.p);
    out.iterations = it;
    out.residual = residual_of(w, tau);
    if (out.residual <= cfg.tol) {
      out.weights.values = w;
      return out;
    }
  }
  throw NonConvergenceError("Lewis weight iteration did not converge in " +
                                std::to_string(cfg.max_iters) + " iterations",
                            out.residual);
}

LewisResult lewis_weights_detailed(const Matrix& A, const LewisConfig& cfg) {
  require_full_column_rank(A);
  const auto n = static_cast<double>(A.rows());
  const auto d = static_cast<double>(A.cols());
  return lewis_iterate(A, cfg, Vector::Constant(A.rows(), d / n));
}

WeightVector lewis_weights(const Matrix& A, const LewisConfig& cfg) {
  return lewis_weights_detailed(A, cfg).weights;
}

}  // namespace lpsens
