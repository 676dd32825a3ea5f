#include "lpsens/leverage.hpp"

#include <cmath>

#include "lpsens/error.hpp"

namespace lpsens {

WeightVector leverage_exact(const Matrix& A) {
  validate(A);
  const PivotedQR qr = pivoted_qr(A);
  const auto r = static_cast<Eigen::Index>(qr.rank);
  WeightVector out;
  out.kind = WeightKind::Leverage;
  out.p = 2.0;
  out.values = qr.q.leftCols(r).rowwise().squaredNorm();
  return out;
}

Eigen::Index leverage_sketch_rows(Eigen::Index n, Eigen::Index d, double eps) {
  const double ln_n = std::log(static_cast<double>(std::max<Eigen::Index>(n, 2)));
  return static_cast<Eigen::Index>(
      std::ceil(8.0 * (ln_n + static_cast<double>(d)) / (eps * eps)));
}

WeightVector leverage_approx(const Matrix& A, double eps, const RandomSource& rng) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("leverage_approx: eps must lie in (0, 1)");
  require_full_column_rank(A);
  const Eigen::Index n = A.rows();
  const Eigen::Index d = A.cols();
  const Eigen::Index r = leverage_sketch_rows(n, d, eps);

  Engine eng = rng.split(stage::kSketch).engine();
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd G(r, n);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = gauss(eng);
  }
  G /= std::sqrt(static_cast<double>(r));

  const Eigen::MatrixXd GA = G * A;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(GA);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();

  // Rows of A R^{-1}, i.e. solve R^T y = a_i^T for every row at once.
  const Eigen::MatrixXd Y =
      R.transpose().triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(A.transpose()));
  WeightVector out;
  out.kind = WeightKind::Leverage;
  out.p = 2.0;
  // True leverage never exceeds 1.
  out.values = Y.colwise().squaredNorm().transpose().cwiseMin(1.0);
  return out;
}

}  // namespace lpsens
