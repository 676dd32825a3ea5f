#include "lpsens/matrix.hpp"

#include <cmath>
#include <string>

#include "lpsens/error.hpp"

namespace lpsens {

void validate(const Matrix& A) {
  if (A.rows() == 0 || A.cols() == 0) {
    throw InputError("matrix must have at least one row and one column");
  }
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (!std::isfinite(A(i, j))) {
        throw InputError("non-finite entry at row " + std::to_string(i) + ", column " +
                         std::to_string(j));
      }
    }
  }
}

void require_full_column_rank(const Matrix& A) {
  validate(A);
  if (A.rows() < A.cols()) {
    throw RankDeficientError("matrix has fewer rows (" + std::to_string(A.rows()) +
                             ") than columns (" + std::to_string(A.cols()) + ")");
  }
  const std::size_t r = numerical_rank(A);
  if (r < static_cast<std::size_t>(A.cols())) {
    throw RankDeficientError("matrix has rank " + std::to_string(r) + " < " +
                             std::to_string(A.cols()) + " columns");
  }
}

namespace {

std::size_t rank_from_r(const Matrix& r) {
  const Eigen::Index k = std::min(r.rows(), r.cols());
  if (k == 0) return 0;
  const double lead = std::abs(r(0, 0));
  if (lead == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::abs(r(i, i)) > kRankTolerance * lead) ++rank;
  }
  return rank;
}

}  // namespace

PivotedQR pivoted_qr(const Matrix& A) {
  Eigen::MatrixXd a = A;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Index n = a.rows();
  const Eigen::Index d = a.cols();
  const Eigen::Index k = std::min(n, d);

  PivotedQR out;
  Eigen::MatrixXd thin = Eigen::MatrixXd::Identity(n, k);
  out.q = qr.householderQ() * thin;
  out.r = qr.matrixR().topRows(k).triangularView<Eigen::Upper>();
  out.perm.resize(static_cast<std::size_t>(d));
  const auto& indices = qr.colsPermutation().indices();
  for (Eigen::Index j = 0; j < d; ++j) {
    out.perm[static_cast<std::size_t>(j)] = static_cast<std::size_t>(indices(j));
  }
  out.rank = rank_from_r(out.r);
  return out;
}

std::size_t numerical_rank(const Matrix& A) {
  return pivoted_qr(A).rank;
}

Matrix pseudoinverse_gram(const Matrix& A) {
  Eigen::MatrixXd a = A;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const Eigen::Index d = a.cols();
  Matrix out = Matrix::Zero(d, d);
  if (s.size() == 0 || s(0) == 0.0) return out;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) <= kRankTolerance * s(0)) break;
    const Eigen::VectorXd v = svd.matrixV().col(k);
    out.noalias() += (v * v.transpose()) / (s(k) * s(k));
  }
  return out;
}

double lp_norm_pow(const Eigen::Ref<const Vector>& x, double p) {
  if (!(p >= 1.0)) throw InputError("lp_norm: p must be >= 1");
  double total = 0.0;
  if (p == 1.0) {
    for (Eigen::Index i = 0; i < x.size(); ++i) total += std::abs(x(i));
  } else if (p == 2.0) {
    total = x.squaredNorm();
  } else {
    for (Eigen::Index i = 0; i < x.size(); ++i) total += std::pow(std::abs(x(i)), p);
  }
  return total;
}

double lp_norm(const Eigen::Ref<const Vector>& x, double p) {
  if (std::isinf(p)) return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  return std::pow(lp_norm_pow(x, p), 1.0 / p);
}

Matrix take_rows(const Matrix& A, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), A.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= static_cast<std::size_t>(A.rows())) throw InputError("take_rows: index out of range");
    out.row(static_cast<Eigen::Index>(k)) = A.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) throw InputError("stack_rows: column counts differ");
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

}  // namespace lpsens
