#pragma once

#include <cstddef>
#include <vector>

#include "lpsens/embed.hpp"
#include "lpsens/matrix.hpp"
#include "lpsens/random.hpp"
#include "lpsens/regress.hpp"
#include "lpsens/weights.hpp"

namespace lpsens {

struct RowwiseConfig {
  double p = 1.0;
  std::size_t alpha = 10;
  std::size_t signs_per_block = 100;
  std::size_t repetitions = 9;  // odd
  double embed_eps = 0.5;
  double embed_constant = kDefaultEmbedConstant;
};

struct RowwiseResult {
  WeightVector estimates;
  std::size_t oracle_calls = 0;
  std::size_t embedding_rows = 0;
  std::size_t blocks_per_repetition = 0;
};

// Random partition of 0..n-1 into ceil(n / alpha) blocks of alpha rows; the
// last block is short when alpha does not divide n.
std::vector<std::vector<std::size_t>> random_blocks(std::size_t n, std::size_t alpha,
                                                    Engine& eng);

// Block-Rademacher estimate of every row's sensitivity: for each repetition,
// each block is compressed into signs_per_block signed sums, every sum is
// scored against S A, and a row takes the max over its block. The result is
// the per-row median across repetitions.
RowwiseResult sensitivities_rowwise(const Matrix& A, const RowwiseConfig& cfg,
                                    const RandomSource& rng,
                                    Execution exec = Execution::Parallel);

}  // namespace lpsens
