#pragma once

#include <cstddef>
#include <vector>

#include "lpsens/embed.hpp"
#include "lpsens/matrix.hpp"
#include "lpsens/random.hpp"
#include "lpsens/regress.hpp"

namespace lpsens {

struct MaxConfig {
  double p = 1.0;
  double embed_eps = 0.5;
  double embed_constant = kDefaultEmbedConstant;
};

struct MaxResult {
  double estimate = 0.0;    // distortion^{p/2} * raw_max
  double raw_max = 0.0;     // max over spanner rows of their sensitivity against S_p A
  double distortion = 1.0;  // of the l_inf embedding; 1 on the exact p = 2 path
  std::vector<std::size_t> spanner_rows;
  std::size_t oracle_calls = 0;
  std::size_t embedding_rows = 0;
};

// Scores the rows of an l_inf row-subset embedding against an l_p embedding.
// p = 2 returns the exact max leverage score.
MaxResult max_sensitivity(const Matrix& A, const MaxConfig& cfg, const RandomSource& rng,
                          Execution exec = Execution::Parallel);

}  // namespace lpsens
