#include "lpsens/embed.hpp"

#include <cmath>
#include <cstdint>
#include <utility>

#include "lpsens/error.hpp"
#include "lpsens/lewis.hpp"

namespace lpsens {

Matrix SamplingEmbedding::materialize(const Matrix& A) const {
  Matrix out(static_cast<Eigen::Index>(source_rows.size()), A.cols());
  for (std::size_t k = 0; k < source_rows.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    out.row(row) = scales(row) * A.row(static_cast<Eigen::Index>(source_rows[k]));
  }
  return out;
}

double lewis_inclusion_probability(double w, std::size_t d, double eps, double c) {
  const double dd = static_cast<double>(d);
  const double log_d = std::max(1.0, std::log(dd));
  const double log_d_eps = std::max(1.0, std::log(dd / eps));
  return std::min(1.0, c * w * log_d * log_d * log_d_eps / (eps * eps));
}

SamplingEmbedding lp_embedding_from_weights(const Matrix& A, const WeightVector& lewis,
                                            double eps, const RandomSource& rng, double c) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("lp_embedding: eps must lie in (0, 1)");
  if (!(c > 0.0)) throw InputError("lp_embedding: constant must be positive");
  if (lewis.size() != A.rows()) throw InputError("lp_embedding: weight length mismatch");
  const double p = lewis.p;
  const auto d = static_cast<std::size_t>(A.cols());

  SamplingEmbedding out;
  out.p = p;
  out.target_distortion = eps;
  std::vector<double> scales;
  Engine eng = rng.split(stage::kEmbedding).engine();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double prob = lewis_inclusion_probability(lewis[i], d, eps, c);
    const double u = uniform01(eng);
    if (prob > 0.0 && u < prob) {
      out.source_rows.push_back(static_cast<std::size_t>(i));
      scales.push_back(prob >= 1.0 ? 1.0 : std::pow(prob, -1.0 / p));
    }
  }
  out.scales = Eigen::Map<const Vector>(scales.data(), static_cast<Eigen::Index>(scales.size()));
  return out;
}

SamplingEmbedding lp_embedding(const Matrix& A, double p, double eps, const RandomSource& rng,
                               double c) {
  LewisConfig cfg;
  cfg.p = p;
  return lp_embedding_from_weights(A, lewis_weights(A, cfg), eps, rng, c);
}

Matrix full_rank_embedding(const Matrix& A, const WeightVector& lewis, double eps,
                           const RandomSource& rng, double c, SamplingEmbedding* used) {
  const auto d = static_cast<std::size_t>(A.cols());
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    const RandomSource source = attempt == 0 ? rng : rng.split(1000 + attempt);
    SamplingEmbedding emb = lp_embedding_from_weights(A, lewis, eps, source, c);
    Matrix SA = emb.materialize(A);
    if (SA.rows() >= A.cols() && numerical_rank(SA) == d) {
      if (used) *used = std::move(emb);
      return SA;
    }
  }
  throw InternalError("lp_embedding: every draw lost column rank");
}

SamplingEmbedding linf_embedding(const Matrix& A) {
  require_full_column_rank(A);
  const Eigen::Index n = A.rows();
  const Eigen::Index d = A.cols();

  // basis.row(k) is either e_k (not yet replaced) or a row of A.
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(d, d);
  std::vector<Eigen::Index> chosen(static_cast<std::size_t>(d), -1);

  // Coefficients of every row of A in the current basis: C = A basis^{-1}.
  auto coefficients = [&]() -> Eigen::MatrixXd {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis.transpose());
    return lu.solve(Eigen::MatrixXd(A.transpose())).transpose();
  };

  // Greedy start: replace e_k by the row maximizing |det|.
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::MatrixXd C = coefficients();
    Eigen::Index best = 0;
    double best_val = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = std::abs(C(i, k));
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    if (best_val <= 0.0) throw RankDeficientError("linf_embedding: matrix is rank deficient");
    basis.row(k) = A.row(best);
    chosen[static_cast<std::size_t>(k)] = best;
  }

  // Swap while some row more than doubles |det|; each swap doubles the
  // determinant so this terminates.
  const int max_swaps = 64 * static_cast<int>(d) * static_cast<int>(d) + 64;
  for (int swaps = 0;; ++swaps) {
    if (swaps > max_swaps) throw InternalError("linf_embedding: swap limit exceeded");
    const Eigen::MatrixXd C = coefficients();
    Eigen::Index row = -1;
    Eigen::Index col = -1;
    for (Eigen::Index i = 0; i < n && row < 0; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) {
        if (std::abs(C(i, k)) > 2.0) {
          row = i;
          col = k;
          break;
        }
      }
    }
    if (row < 0) break;
    basis.row(col) = A.row(row);
    chosen[static_cast<std::size_t>(col)] = row;
  }

  SamplingEmbedding out;
  out.p = std::numeric_limits<double>::infinity();
  out.target_distortion = 2.0 * static_cast<double>(d);
  for (Eigen::Index idx : chosen) out.source_rows.push_back(static_cast<std::size_t>(idx));
  out.scales = Vector::Ones(d);
  return out;
}

}  // namespace lpsens
