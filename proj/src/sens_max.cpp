#include "lpsens/sens_max.hpp"

#include <cmath>

#include "lpsens/error.hpp"
#include "lpsens/leverage.hpp"
#include "lpsens/lewis.hpp"

namespace lpsens {

MaxResult max_sensitivity(const Matrix& A, const MaxConfig& cfg, const RandomSource& rng,
                          Execution exec) {
  validate(A);
  if (!(cfg.p >= 1.0) || !std::isfinite(cfg.p)) throw InputError("max: p must be >= 1");
  require_full_column_rank(A);

  MaxResult out;
  if (cfg.p == 2.0) {
    const WeightVector tau = leverage_exact(A);
    Eigen::Index arg = 0;
    out.raw_max = tau.values.maxCoeff(&arg);
    out.estimate = out.raw_max;
    out.spanner_rows = {static_cast<std::size_t>(arg)};
    return out;
  }

  const SamplingEmbedding spanner = linf_embedding(A);
  LewisConfig lewis_cfg;
  lewis_cfg.p = cfg.p;
  const WeightVector lewis = lewis_weights(A, lewis_cfg);
  const Matrix SA = full_rank_embedding(A, lewis, cfg.embed_eps, rng, cfg.embed_constant);
  const HyperplaneSolver solver(SA, cfg.p);

  const Vector scores = solver.sensitivities(take_rows(A, spanner.source_rows), exec);
  out.raw_max = scores.maxCoeff();
  out.distortion = spanner.target_distortion;
  out.estimate = std::pow(out.distortion, cfg.p / 2.0) * out.raw_max;
  out.spanner_rows = spanner.source_rows;
  out.oracle_calls = spanner.source_rows.size();
  out.embedding_rows = static_cast<std::size_t>(SA.rows());
  return out;
}

}  // namespace lpsens
