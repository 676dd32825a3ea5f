#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "lpsens/matrix.hpp"
#include "lpsens/random.hpp"
#include "lpsens/weights.hpp"

namespace lpsens {

inline constexpr double kDefaultEmbedConstant = 4.0;

// Row-sampling matrix S: row k of S A is scales[k] * A.row(source_rows[k]).
struct SamplingEmbedding {
  std::vector<std::size_t> source_rows;
  Vector scales;
  double p = 1.0;
  double target_distortion = 0.0;

  std::size_t rows() const { return source_rows.size(); }
  Matrix materialize(const Matrix& A) const;
};

// min(1, c eps^-2 w_i log^2 d log(d/eps)), both logs floored at 1.
double lewis_inclusion_probability(double w, std::size_t d, double eps, double c);

SamplingEmbedding lp_embedding(const Matrix& A, double p, double eps, const RandomSource& rng,
                               double c = kDefaultEmbedConstant);

// As above with Lewis weights already computed.
SamplingEmbedding lp_embedding_from_weights(const Matrix& A, const WeightVector& lewis,
                                            double eps, const RandomSource& rng,
                                            double c = kDefaultEmbedConstant);

// Materialized S A from lp_embedding_from_weights. A draw that loses column
// rank is redrawn on a child stream, up to 16 times.
Matrix full_rank_embedding(const Matrix& A, const WeightVector& lewis, double eps,
                           const RandomSource& rng, double c = kDefaultEmbedConstant,
                           SamplingEmbedding* used = nullptr);

// 2-approximate barycentric spanner: d rows such that every row of A is a
// combination of them with coefficients in [-2, 2].
SamplingEmbedding linf_embedding(const Matrix& A);

}  // namespace lpsens
