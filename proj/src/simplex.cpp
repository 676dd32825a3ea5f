#include "lpsens/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "lpsens/error.hpp"

namespace lpsens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;

// Shifted problem: y = x - lower, 0 <= y <= ub. Columns n..n+m-1 are the
// artificials; they start basic and are barred from re-entering in phase 2.
class Tableau {
 public:
  Tableau(const LinearProgram& lp, const LpOptions& opts)
      : m_(lp.A.rows()), n_(lp.A.cols()), max_iters_(opts.max_iters), pricing_(opts.pricing) {
    T_.resize(m_, n_ + m_);
    T_.leftCols(n_) = lp.A;
    T_.rightCols(m_).setIdentity();
    at_upper_.assign(static_cast<std::size_t>(n_ + m_), false);
    Vector start = lp.lower;
    if (!lp.start_at_upper.empty()) {
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (lp.start_at_upper[static_cast<std::size_t>(j)] && lp.upper(j) < kInf) {
          at_upper_[static_cast<std::size_t>(j)] = true;
          start(j) = lp.upper(j);
        }
      }
    }
    beta_ = lp.b - lp.A * start;
    row_sign_ = Vector::Ones(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (beta_(i) < 0.0) {
        row_sign_(i) = -1.0;
        beta_(i) = -beta_(i);
        T_.row(i).head(n_) *= -1.0;
      }
    }
    ub_ = Vector::Constant(n_ + m_, kInf);
    ub_.head(n_) = lp.upper - lp.lower;
    is_basic_.assign(static_cast<std::size_t>(n_ + m_), false);
    basis_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index i = 0; i < m_; ++i) {
      basis_[static_cast<std::size_t>(i)] = n_ + i;
      is_basic_[static_cast<std::size_t>(n_ + i)] = true;
    }
    rhs_scale_ = 1.0 + (beta_.size() ? beta_.cwiseAbs().maxCoeff() : 0.0);
    crash_slack_basis();
  }

  LpResult run(const LinearProgram& lp) {
    LpResult res;
    // Phase 1: minimize the sum of artificials.
    Vector cost1 = Vector::Zero(n_ + m_);
    cost1.tail(m_).setOnes();
    set_costs(cost1);
    LpStatus st = iterate(/*phase=*/1);
    res.iterations = iterations_;
    if (st == LpStatus::IterLimit) {
      res.status = st;
      return res;
    }
    double infeasibility = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] >= n_) infeasibility += std::abs(beta_(i));
    }
    if (infeasibility > 1e-9 * rhs_scale_) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    drive_out_artificials();

    // Phase 2 on the original costs.
    Vector cost2 = Vector::Zero(n_ + m_);
    cost2.head(n_) = lp.c;
    set_costs(cost2);
    st = iterate(/*phase=*/2);
    res.iterations = iterations_;
    res.status = st;
    if (st != LpStatus::Optimal) return res;

    Vector y(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      y(j) = at_upper_[static_cast<std::size_t>(j)] ? ub_(j) : 0.0;
    }
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) y(j) = beta_(i);
    }
    res.x = y + lp.lower;
    res.objective = lp.c.dot(res.x);
    res.duals.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) res.duals(i) = -row_sign_(i) * d_(n_ + i);
    return res;
  }

 private:
  // Rows owning a unit column with a positive coefficient start with that
  // column basic instead of their artificial.
  void crash_slack_basis() {
    std::vector<Eigen::Index> owner(static_cast<std::size_t>(n_), -1);
    for (Eigen::Index j = 0; j < n_; ++j) {
      Eigen::Index row = -1;
      int nonzeros = 0;
      for (Eigen::Index i = 0; i < m_ && nonzeros < 2; ++i) {
        if (T_(i, j) != 0.0) {
          ++nonzeros;
          row = i;
        }
      }
      if (nonzeros == 1 && T_(row, j) > 0.0) owner[static_cast<std::size_t>(j)] = row;
    }
    std::vector<bool> claimed(static_cast<std::size_t>(m_), false);
    for (Eigen::Index j = 0; j < n_; ++j) {
      const Eigen::Index i = owner[static_cast<std::size_t>(j)];
      if (i < 0 || claimed[static_cast<std::size_t>(i)] || at_upper_[static_cast<std::size_t>(j)]) {
        continue;
      }
      const double v = T_(i, j);
      if (beta_(i) / v > ub_(j)) continue;
      claimed[static_cast<std::size_t>(i)] = true;
      T_.row(i) /= v;
      beta_(i) /= v;
      is_basic_[static_cast<std::size_t>(n_ + i)] = false;
      ub_(n_ + i) = 0.0;
      basis_[static_cast<std::size_t>(i)] = j;
      is_basic_[static_cast<std::size_t>(j)] = true;
    }
  }

  void set_costs(const Vector& cost) {
    cost_ = cost;
    d_ = cost;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = cost(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) d_.noalias() -= cb * T_.row(i).transpose();
    }
  }

  Eigen::Index choose_entering(int phase) const {
    const Eigen::Index limit = phase == 1 ? n_ + m_ : n_;
    const bool bland = pricing_ == Pricing::Bland || degenerate_run_ >= kDegenerateRun;
    Eigen::Index best = -1;
    double best_score = 0.0;
    for (Eigen::Index j = 0; j < limit; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (is_basic_[uj] || ub_(j) == 0.0) continue;
      double score = 0.0;
      if (!at_upper_[uj] && d_(j) < -kCostTol) score = -d_(j);
      if (at_upper_[uj] && d_(j) > kCostTol) score = d_(j);
      if (score == 0.0) continue;
      if (bland) return j;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  LpStatus iterate(int phase) {
    while (true) {
      if (phase == 1) {
        double infeasibility = 0.0;
        for (Eigen::Index i = 0; i < m_; ++i) {
          if (basis_[static_cast<std::size_t>(i)] >= n_) infeasibility += beta_(i);
        }
        if (infeasibility <= 1e-12 * rhs_scale_) return LpStatus::Optimal;
      }
      const Eigen::Index q = choose_entering(phase);
      if (q < 0) return LpStatus::Optimal;
      if (iterations_ >= max_iters_) return LpStatus::IterLimit;
      ++iterations_;

      const auto uq = static_cast<std::size_t>(q);
      const double dir = at_upper_[uq] ? -1.0 : 1.0;

      // Ratio test; ties go to the basic variable with the smallest index.
      double t_best = ub_(q);
      Eigen::Index leave_row = -1;
      Eigen::Index leave_var = std::numeric_limits<Eigen::Index>::max();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double delta = dir * T_(i, q);
        double t;
        if (delta > kPivotTol) {
          t = std::max(0.0, beta_(i)) / delta;
        } else if (delta < -kPivotTol) {
          const double ubb = ub_(basis_[static_cast<std::size_t>(i)]);
          if (ubb == kInf) continue;
          t = std::max(0.0, ubb - beta_(i)) / (-delta);
        } else {
          continue;
        }
        const Eigen::Index var = basis_[static_cast<std::size_t>(i)];
        const double slack = t_best == kInf ? 0.0 : 1e-12 * (1.0 + t_best);
        const bool better = t < t_best - slack;
        const bool tie_wins = leave_row >= 0 && t <= t_best + slack && var < leave_var;
        if (better || tie_wins) {
          t_best = t;
          leave_row = i;
          leave_var = var;
        }
      }
      if (t_best == kInf) return LpStatus::Unbounded;
      degenerate_run_ = t_best == 0.0 ? degenerate_run_ + 1 : 0;

      beta_.noalias() -= (t_best * dir) * T_.col(q);
      if (leave_row < 0) {
        at_upper_[uq] = !at_upper_[uq];
        continue;
      }

      const auto lr = static_cast<std::size_t>(leave_row);
      const Eigen::Index leaving = basis_[lr];
      const double delta_r = dir * T_(leave_row, q);
      at_upper_[static_cast<std::size_t>(leaving)] = delta_r < 0.0;
      is_basic_[static_cast<std::size_t>(leaving)] = false;
      const double entering_value = at_upper_[uq] ? ub_(q) - t_best : t_best;
      pivot(leave_row, q);
      beta_(leave_row) = entering_value;
      basis_[lr] = q;
      is_basic_[uq] = true;
      at_upper_[uq] = false;
    }
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    const double piv = T_(r, q);
    T_.row(r) /= piv;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = T_(i, q);
      if (f != 0.0) T_.row(i) -= f * T_.row(r);
    }
    const double dq = d_(q);
    if (dq != 0.0) d_.noalias() -= dq * T_.row(r).transpose();
    // beta of non-pivot rows was already moved by the ratio step.
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const Eigen::Index art = basis_[ui];
      if (art < n_) continue;
      Eigen::Index q = -1;
      double best = kPivotTol;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        if (std::abs(T_(i, j)) > best) {
          best = std::abs(T_(i, j));
          q = j;
        }
      }
      if (q < 0) continue;  // redundant row, artificial stays basic at zero
      const auto uq = static_cast<std::size_t>(q);
      const double value = at_upper_[uq] ? ub_(q) : 0.0;
      pivot(i, q);
      beta_(i) = value;
      basis_[ui] = q;
      is_basic_[uq] = true;
      at_upper_[uq] = false;
      is_basic_[static_cast<std::size_t>(art)] = false;
      at_upper_[static_cast<std::size_t>(art)] = false;
    }
    ub_.tail(m_).setZero();
  }

  Eigen::Index m_;
  Eigen::Index n_;
  static constexpr int kDegenerateRun = 8;

  int max_iters_;
  Pricing pricing_;
  int iterations_ = 0;
  int degenerate_run_ = 0;
  Matrix T_;
  Vector beta_;
  Vector row_sign_;
  Vector ub_;
  Vector cost_;
  Vector d_;
  double rhs_scale_ = 1.0;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> at_upper_;
  std::vector<bool> is_basic_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, LpOptions opts) {
  const Eigen::Index m = lp.A.rows();
  const Eigen::Index n = lp.A.cols();
  if (lp.b.size() != m || lp.c.size() != n || lp.lower.size() != n || lp.upper.size() != n) {
    throw InputError("solve_lp: inconsistent dimensions");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower(j))) throw InputError("solve_lp: lower bounds must be finite");
    if (lp.upper(j) < lp.lower(j)) {
      LpResult res;
      res.status = LpStatus::Infeasible;
      return res;
    }
  }
  if (!lp.start_at_upper.empty() && lp.start_at_upper.size() != static_cast<std::size_t>(n)) {
    throw InputError("solve_lp: start_at_upper length mismatch");
  }
  if (opts.max_iters <= 0) opts.max_iters = static_cast<int>(50 * (m + n) + 1000);
  Tableau tableau(lp, opts);
  return tableau.run(lp);
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterLimit: return "iteration_limit";
  }
  return "unknown";
}

}  // namespace lpsens
