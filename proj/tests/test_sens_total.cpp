#include "doctest.h"

#include <cmath>
#include <vector>

#include "lpsens/error.hpp"
#include "lpsens/lewis.hpp"
#include "lpsens/sens_total.hpp"
#include "support.hpp"

using namespace lpsens;

namespace {

Matrix toy() {
  Matrix A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  return A;
}

bool embedding_keeps_everything(const Matrix& A, double p, double eps) {
  LewisConfig cfg;
  cfg.p = p;
  const WeightVector w = lewis_weights(A, cfg);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (lewis_inclusion_probability(w[i], static_cast<std::size_t>(A.cols()), eps,
                                    kDefaultEmbedConstant) < 1.0) {
      return false;
    }
  }
  return true;
}

TotalConfig recursive_config(double gamma = 0.2) {
  TotalConfig cfg;
  cfg.method = TotalMethod::RecursiveL1;
  cfg.gamma = gamma;
  return cfg;
}

}  // namespace

TEST_CASE("sample count") {
  CHECK(oneshot_sample_count(5, 2.0, 0.2, 10.0) == 250);
  CHECK(oneshot_sample_count(4, 1.0, 0.5, 10.0) == 80);
  CHECK(oneshot_sample_count(4, 4.0, 0.5, 1.0) == 16);
}

TEST_CASE("one-shot total of the identity is exact") {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    TotalConfig cfg;
    cfg.p = p;
    const TotalResult res = total_lewis_oneshot(Matrix::Identity(5, 5), cfg, RandomSource(1));
    CHECK(res.estimate == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(res.samples == oneshot_sample_count(5, p, 0.2, 10.0));
    CHECK(res.distinct_rows <= 5);
  }
}

TEST_CASE("one-shot total at p = 2 tracks the rank") {
  const Matrix A = testing::gaussian(300, 5, 40);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TotalConfig cfg;
    cfg.p = 2.0;
    const double est = total_lewis_oneshot(A, cfg, RandomSource(seed)).estimate;
    // Rows dropped by the embedding move the estimate slightly below the rank.
    CHECK(est >= 5.0 * 0.95);
    CHECK(est <= 5.0 * 2.6);
  }
}

TEST_CASE("one-shot total on a replicated matrix") {
  const Matrix A = testing::replicate_rows(toy(), 50);
  const double truth = sensitivities_exact(A, 1.0).sum();
  CHECK(truth == doctest::Approx(1.5).epsilon(1e-9));
  int good = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TotalConfig cfg;
    const double est = total_lewis_oneshot(A, cfg, RandomSource(seed)).estimate;
    good += std::abs(est - truth) <= 3.0 * cfg.gamma * truth;
  }
  CHECK(good >= 45);
}

TEST_CASE("one-shot total composes its stages") {
  const Matrix A = testing::gaussian(120, 3, 41);
  TotalConfig cfg;
  cfg.p = 1.5;
  const RandomSource rng(9);
  const TotalResult res = total_lewis_oneshot(A, cfg, rng, Execution::Serial);

  LewisConfig lc;
  lc.p = 1.5;
  const WeightVector w = lewis_weights(A, lc);
  const Vector v = w.values / w.sum();
  const Matrix SA = full_rank_embedding(A, w, cfg.embed_eps, rng);
  const std::size_t m = oneshot_sample_count(3, 1.5, cfg.gamma, cfg.sample_constant);
  const auto sample = draw_importance_sample(v, m, rng.split(stage::kSampling));
  Vector values = Vector::Zero(A.rows());
  for (std::size_t i : sample) {
    const auto k = static_cast<Eigen::Index>(i);
    values(k) = sensitivity_one(A.row(k).transpose(), SA, 1.5);
  }
  CHECK(res.estimate == doctest::Approx(importance_estimate(sample, v, values)).epsilon(1e-12));
  CHECK(res.embedding_rows == static_cast<std::size_t>(SA.rows()));
}

TEST_CASE("importance estimate is unbiased") {
  const Matrix A = testing::gaussian(100, 3, 42);
  LewisConfig lc;
  const WeightVector w = lewis_weights(A, lc);
  const Vector v = w.values / w.sum();
  const Matrix SA = full_rank_embedding(A, w, 0.5, RandomSource(3));
  Vector values(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) values(i) = sensitivity_one(A.row(i).transpose(), SA, 1.0);
  const double target = values.sum();
  const std::size_t m = oneshot_sample_count(3, 1.0, 0.2, 10.0);
  const int runs = 10000;
  double sum = 0.0;
  double sq = 0.0;
  for (int s = 0; s < runs; ++s) {
    const double est = importance_estimate(draw_importance_sample(v, m, RandomSource(static_cast<std::uint64_t>(s))), v, values);
    sum += est;
    sq += est * est;
  }
  const double mean = sum / runs;
  const double se = std::sqrt((sq / runs - mean * mean) / runs);
  CHECK(std::abs(mean - target) <= 3.0 * se);
}

TEST_CASE("total sensitivity lower bound") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Matrix A = testing::gaussian(25, 3, 43 + seed);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const double total = sensitivities_exact(A, p).sum();
      const double bound = p >= 2.0 ? 3.0 : std::pow(3.0, p / 2.0);
      CHECK(total >= bound - 1e-6);
    }
  }
}

TEST_CASE("bounded ratio sampler") {
  CHECK(bounded_ratio_sample_size(10, 0.1, 0.05) ==
        static_cast<std::size_t>(std::ceil(10.0 * 10 * 1.1 / 0.01 * std::log(20.0))));
  CHECK(bounded_ratio_mean(37, [](std::size_t) { return 2.5; }, 1.0, 0.5, 0.1, RandomSource(1)) ==
        doctest::Approx(92.5).epsilon(1e-12));

  std::vector<double> spiky(1000, 1.0);
  spiky.back() = 100.0;
  const double spiky_sum = 1099.0;
  int failures = 0;
  for (std::uint64_t t = 0; t < 500; ++t) {
    const double est = bounded_ratio_mean(1000, [&](std::size_t i) { return spiky[i]; }, 100.0, 0.2,
                                          0.05, RandomSource(t));
    failures += std::abs(est - spiky_sum) > 0.2 * spiky_sum;
  }
  CHECK(failures <= 25);

  std::vector<double> flat(10000);
  Engine eng = RandomSource(2).engine();
  for (double& x : flat) x = 1.0 + 9.0 * uniform01(eng);
  double flat_sum = 0.0;
  for (double x : flat) flat_sum += x;
  failures = 0;
  for (std::uint64_t t = 0; t < 500; ++t) {
    const double est = bounded_ratio_mean(10000, [&](std::size_t i) { return flat[i]; }, 10.0, 0.1,
                                          0.01, RandomSource(1000 + t));
    failures += std::abs(est - flat_sum) > 0.1 * flat_sum;
  }
  CHECK(failures <= 5);
  CHECK_THROWS_AS(bounded_ratio_sample_size(0.5, 0.1, 0.1), InputError);
}

TEST_CASE("recursive total requires p = 1") {
  TotalConfig cfg = recursive_config();
  cfg.p = 2.0;
  CHECK_THROWS_AS(total_recursive_l1(testing::gaussian(20, 2, 1), cfg, RandomSource(1)), InputError);
  CHECK(parse_total_method("recursive_l1") == TotalMethod::RecursiveL1);
  CHECK(std::string(to_string(TotalMethod::LewisOneshot)) == "lewis_oneshot");
  CHECK_THROWS_AS(parse_total_method("median"), InputError);
}

TEST_CASE("recursive total with an immediate base case") {
  const Matrix A = testing::gaussian(40, 3, 44);
  REQUIRE(embedding_keeps_everything(A, 1.0, 0.05));
  TotalConfig cfg = recursive_config();
  cfg.recursive.base = 1.0;
  const TotalResult res = total_recursive_l1(A, cfg, RandomSource(2));
  CHECK(res.nodes == 1);
  CHECK(res.estimate ==
        doctest::Approx((1.0 + cfg.gamma) * sensitivities_exact(A, 1.0).sum()).epsilon(1e-8));
}

TEST_CASE("recursive buckets cover every row once") {
  const Matrix A = testing::gaussian(60, 3, 45);
  REQUIRE(embedding_keeps_everything(A, 1.0, 0.05));
  TotalConfig cfg = recursive_config();
  cfg.recursive.base = 0.0;
  cfg.recursive.sample = 1e6;
  const TotalResult res = total_recursive_l1(A, cfg, RandomSource(3));
  CHECK(res.nodes == 1);
  CHECK(res.exact_buckets >= 1);
  CHECK(res.distinct_rows == 60);
  const double expected = (1.0 + cfg.gamma) * (1.0 + res.rho) * sensitivities_exact(A, 1.0).sum();
  CHECK(res.estimate == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("recursive total on identical rows is exact up to its factors") {
  const Matrix A = Matrix::Ones(400, 1);
  TotalConfig cfg = recursive_config();
  const TotalResult res = total_recursive_l1(A, cfg, RandomSource(4));
  CHECK(res.nodes >= 2);
  bool matched = false;
  for (std::size_t k = 0; k <= res.depth_limit; ++k) {
    const double expected = (1.0 + cfg.gamma) * std::pow(1.0 + res.rho, static_cast<double>(k));
    matched = matched || std::abs(res.estimate - expected) <= 1e-9 * expected;
  }
  CHECK(matched);
}

TEST_CASE("recursive total on stacked identities") {
  const Matrix A = testing::identity_stack(4, 100);
  int over = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TotalResult res = total_recursive_l1(A, recursive_config(), RandomSource(seed));
    CHECK(res.samples > 0);
    CHECK(res.max_depth <= res.depth_limit);
    over += res.estimate >= 4.0 * (1.0 - 1e-9);
    CHECK(res.estimate <= 4.0 * 1.5);
  }
  CHECK(over >= 19);
}

TEST_CASE("recursive total terminates for large gamma") {
  const Matrix A = testing::gaussian(300, 4, 46);
  const double truth = sensitivities_exact(A, 1.0).sum();
  for (double gamma : {0.5, 0.9}) {
    const TotalResult res = total_recursive_l1(A, recursive_config(gamma), RandomSource(5));
    CHECK(res.max_depth <= res.depth_limit);
    CHECK(res.estimate >= truth * 0.8);
    CHECK(res.estimate <= truth * 3.0);
  }
}

TEST_CASE("total estimators are deterministic") {
  const Matrix A = testing::gaussian(150, 3, 47);
  for (TotalMethod method : {TotalMethod::LewisOneshot, TotalMethod::RecursiveL1}) {
    TotalConfig cfg;
    cfg.method = method;
    const double a = total_sensitivity(A, cfg, RandomSource(6), Execution::Serial).estimate;
    const double b = total_sensitivity(A, cfg, RandomSource(6), Execution::Parallel).estimate;
    CHECK(a == b);
  }
}
