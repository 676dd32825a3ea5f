#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace lpsens {

// Dense row-major storage; rows are the data points.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Relative threshold on |R_kk| / |R_00| used for numerical rank everywhere.
inline constexpr double kRankTolerance = 1e-10;

struct PivotedQR {
  Matrix q;                        // n x k with orthonormal columns, k = min(n, d)
  Matrix r;                        // k x d upper trapezoidal, columns permuted
  std::vector<std::size_t> perm;   // column j of r is column perm[j] of A
  std::size_t rank = 0;
};

// Throws InputError unless A is non-empty with finite entries.
void validate(const Matrix& A);

// Throws RankDeficientError unless A has n >= d and full column rank.
void require_full_column_rank(const Matrix& A);

std::size_t numerical_rank(const Matrix& A);

PivotedQR pivoted_qr(const Matrix& A);

// (A^T A)^+ computed from an SVD of A.
Matrix pseudoinverse_gram(const Matrix& A);

// ||x||_p^p; p must be >= 1.
double lp_norm_pow(const Eigen::Ref<const Vector>& x, double p);

double lp_norm(const Eigen::Ref<const Vector>& x, double p);

// Rows of A selected by index, in the order given.
Matrix take_rows(const Matrix& A, const std::vector<std::size_t>& rows);

// [top; bottom]; column counts must agree.
Matrix stack_rows(const Matrix& top, const Matrix& bottom);

}  // namespace lpsens
