#include "lpsens/sens_all.hpp"

#include <algorithm>
#include <cmath>

#include "lpsens/error.hpp"
#include "lpsens/lewis.hpp"

namespace lpsens {

std::vector<std::vector<std::size_t>> random_blocks(std::size_t n, std::size_t alpha,
                                                    Engine& eng) {
  if (alpha == 0) throw InputError("random_blocks: alpha must be positive");
  const std::vector<std::size_t> perm = random_permutation(eng, n);
  std::vector<std::vector<std::size_t>> blocks;
  blocks.reserve((n + alpha - 1) / alpha);
  for (std::size_t start = 0; start < n; start += alpha) {
    const std::size_t stop = std::min(n, start + alpha);
    blocks.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                        perm.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return blocks;
}

namespace {

void check_config(const Matrix& A, const RowwiseConfig& cfg) {
  if (!(cfg.p >= 1.0) || !std::isfinite(cfg.p)) throw InputError("rowwise: p must be >= 1");
  if (cfg.alpha < 1 || cfg.alpha > static_cast<std::size_t>(A.rows())) {
    throw InputError("rowwise: alpha must lie in [1, n]");
  }
  if (cfg.signs_per_block < 1) throw InputError("rowwise: signs_per_block must be positive");
  if (cfg.repetitions < 1 || cfg.repetitions % 2 == 0) {
    throw InputError("rowwise: repetitions must be odd");
  }
}

}  // namespace

RowwiseResult sensitivities_rowwise(const Matrix& A, const RowwiseConfig& cfg,
                                    const RandomSource& rng, Execution exec) {
  validate(A);
  check_config(A, cfg);
  require_full_column_rank(A);
  const auto n = static_cast<std::size_t>(A.rows());
  const Eigen::Index d = A.cols();

  LewisConfig lewis_cfg;
  lewis_cfg.p = cfg.p;
  const WeightVector lewis = lewis_weights(A, lewis_cfg);
  const Matrix SA = full_rank_embedding(A, lewis, cfg.embed_eps, rng, cfg.embed_constant);
  const HyperplaneSolver solver(SA, cfg.p);

  const std::size_t reps = cfg.repetitions;
  const std::size_t spb = cfg.signs_per_block;
  const std::size_t nblocks = (n + cfg.alpha - 1) / cfg.alpha;

  // Partitions and signed block sums for every repetition, stacked into P.
  std::vector<std::vector<std::vector<std::size_t>>> partitions(reps);
  Matrix P(static_cast<Eigen::Index>(reps * nblocks * spb), d);
  for (std::size_t t = 0; t < reps; ++t) {
    Engine part_eng = rng.split(stage::kPartition).split(t).engine();
    partitions[t] = random_blocks(n, cfg.alpha, part_eng);
    Engine sign_eng = rng.split(stage::kSigns).split(t).engine();
    for (std::size_t b = 0; b < nblocks; ++b) {
      for (std::size_t j = 0; j < spb; ++j) {
        const auto row = static_cast<Eigen::Index>((t * nblocks + b) * spb + j);
        P.row(row).setZero();
        for (std::size_t i : partitions[t][b]) {
          P.row(row) += rademacher(sign_eng) * A.row(static_cast<Eigen::Index>(i));
        }
      }
    }
  }

  const Vector scores = solver.sensitivities(P, exec);

  Matrix per_rep(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(reps));
  for (std::size_t t = 0; t < reps; ++t) {
    for (std::size_t b = 0; b < nblocks; ++b) {
      const auto first = static_cast<Eigen::Index>((t * nblocks + b) * spb);
      const double block_max = scores.segment(first, static_cast<Eigen::Index>(spb)).maxCoeff();
      for (std::size_t i : partitions[t][b]) {
        per_rep(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = block_max;
      }
    }
  }

  RowwiseResult out;
  out.estimates.kind = WeightKind::Estimate;
  out.estimates.p = cfg.p;
  out.estimates.values.resize(static_cast<Eigen::Index>(n));
  std::vector<double> column(reps);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < reps; ++t) {
      column[t] = per_rep(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
    }
    std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(reps / 2),
                     column.end());
    out.estimates.values(static_cast<Eigen::Index>(i)) = column[reps / 2];
  }
  out.oracle_calls = static_cast<std::size_t>(P.rows());
  out.embedding_rows = static_cast<std::size_t>(SA.rows());
  out.blocks_per_repetition = nblocks;
  return out;
}

}  // namespace lpsens
