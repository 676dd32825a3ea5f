#include "doctest.h"

#include <algorithm>
#include <set>

#include "lpsens/embed.hpp"
#include "lpsens/error.hpp"
#include "lpsens/lewis.hpp"
#include "lpsens/sens_all.hpp"
#include "support.hpp"

using namespace lpsens;

TEST_CASE("blocks partition the rows") {
  for (std::size_t n : {10u, 17u, 100u}) {
    for (std::size_t alpha : {1u, 3u, 10u}) {
      Engine eng = RandomSource(n * 31 + alpha).engine();
      const auto blocks = random_blocks(n, alpha, eng);
      CHECK(blocks.size() == (n + alpha - 1) / alpha);
      std::multiset<std::size_t> seen;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (b + 1 < blocks.size()) CHECK(blocks[b].size() == alpha);
        seen.insert(blocks[b].begin(), blocks[b].end());
      }
      CHECK(seen.size() == n);
      for (std::size_t i = 0; i < n; ++i) CHECK(seen.count(i) == 1);
    }
  }
}

TEST_CASE("oracle calls follow the block count") {
  const Matrix A = testing::gaussian(53, 3, 30);
  RowwiseConfig cfg;
  cfg.alpha = 10;
  cfg.signs_per_block = 7;
  cfg.repetitions = 3;
  const RowwiseResult res = sensitivities_rowwise(A, cfg, RandomSource(1));
  CHECK(res.blocks_per_repetition == 6);
  CHECK(res.oracle_calls == 3 * 7 * 6);
  CHECK(res.estimates.size() == 53);
  CHECK(res.estimates.values.minCoeff() >= 0.0);
}

TEST_CASE("rowwise estimates are deterministic and execution independent") {
  const Matrix A = testing::gaussian(80, 3, 31);
  for (double p : {1.0, 2.5}) {
    RowwiseConfig cfg;
    cfg.p = p;
    cfg.alpha = 8;
    cfg.signs_per_block = 10;
    cfg.repetitions = 3;
    const RowwiseResult a = sensitivities_rowwise(A, cfg, RandomSource(7), Execution::Serial);
    const RowwiseResult b = sensitivities_rowwise(A, cfg, RandomSource(7), Execution::Parallel);
    const RowwiseResult c = sensitivities_rowwise(A, cfg, RandomSource(7), Execution::Parallel);
    CHECK((a.estimates.values - b.estimates.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK((b.estimates.values - c.estimates.values).cwiseAbs().maxCoeff() == 0.0);
    const RowwiseResult other = sensitivities_rowwise(A, cfg, RandomSource(8));
    CHECK((a.estimates.values - other.estimates.values).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("blocks of one row recover the exact sensitivities") {
  // A large sampling constant makes every inclusion probability 1, so S A = A.
  const Matrix A = testing::gaussian(30, 3, 32);
  const double big = 1e4;
  for (double p : {1.0, 1.5, 3.0}) {
    LewisConfig lc;
    lc.p = p;
    const WeightVector w = lewis_weights(A, lc);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      REQUIRE(lewis_inclusion_probability(w[i], 3, 0.5, big) == 1.0);
    }
    RowwiseConfig cfg;
    cfg.p = p;
    cfg.alpha = 1;
    cfg.embed_constant = big;
    cfg.signs_per_block = 2;
    cfg.repetitions = 1;
    const RowwiseResult res = sensitivities_rowwise(A, cfg, RandomSource(3));
    const WeightVector exact = sensitivities_exact(A, p);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      CHECK(res.estimates[i] == doctest::Approx(exact[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("stacked identity lower bound") {
  const Eigen::Index k = 8;
  const Matrix A = testing::identity_stack(3, k);
  int held = 0;
  int total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RowwiseConfig cfg;
    cfg.alpha = static_cast<std::size_t>(k);
    cfg.signs_per_block = 20;
    cfg.repetitions = 3;
    const RowwiseResult res = sensitivities_rowwise(A, cfg, RandomSource(seed));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      ++total;
      held += res.estimates[i] >= 1.0 / static_cast<double>(k) - 1e-9;
      CHECK(res.estimates[i] <= 4.0);
    }
  }
  CHECK(held >= total * 95 / 100);
}

TEST_CASE("rowwise configuration errors") {
  const Matrix A = testing::gaussian(20, 2, 33);
  RowwiseConfig cfg;
  cfg.alpha = 0;
  CHECK_THROWS_AS(sensitivities_rowwise(A, cfg, RandomSource(1)), InputError);
  cfg.alpha = 21;
  CHECK_THROWS_AS(sensitivities_rowwise(A, cfg, RandomSource(1)), InputError);
  cfg.alpha = 4;
  cfg.repetitions = 2;
  CHECK_THROWS_AS(sensitivities_rowwise(A, cfg, RandomSource(1)), InputError);
  cfg.repetitions = 3;
  cfg.signs_per_block = 0;
  CHECK_THROWS_AS(sensitivities_rowwise(A, cfg, RandomSource(1)), InputError);
  cfg.signs_per_block = 5;
  cfg.p = 0.5;
  CHECK_THROWS_AS(sensitivities_rowwise(A, cfg, RandomSource(1)), InputError);
  CHECK_THROWS_AS(sensitivities_rowwise(Matrix::Ones(20, 2), RowwiseConfig{}, RandomSource(1)),
                  RankDeficientError);
}
