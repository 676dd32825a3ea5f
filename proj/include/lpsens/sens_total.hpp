#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "lpsens/embed.hpp"
#include "lpsens/matrix.hpp"
#include "lpsens/random.hpp"
#include "lpsens/regress.hpp"

namespace lpsens {

enum class TotalMethod { LewisOneshot, RecursiveL1 };

// Constants hidden inside the O(.) terms of the recursive l1 estimator.
struct RecursiveConstants {
  double rho = 1.0;       // rho = gamma / (rho * D)
  double sample = 5e-4;   // r = sample * sqrt|C| (1 + rho) rho^-2 ln(1/delta)
  double base = 3e-5;     // b = base * D^4 gamma^-2 max(D^4 gamma^-2, sqrt d)
  double buckets = 20.0;  // B = ceil(buckets * log2 n)
};

struct TotalConfig {
  double p = 1.0;
  double gamma = 0.2;
  TotalMethod method = TotalMethod::LewisOneshot;
  double sample_constant = 10.0;  // c_m in m = c_m d^{|1-p/2|} / gamma^2
  double embed_eps = 0.5;
  double embed_constant = kDefaultEmbedConstant;
  RecursiveConstants recursive;
};

struct TotalResult {
  double estimate = 0.0;
  std::size_t samples = 0;         // one-shot: m; recursive: rows drawn over all nodes
  std::size_t distinct_rows = 0;   // distinct rows of A whose sensitivity was computed
  std::size_t oracle_calls = 0;
  std::size_t embedding_rows = 0;
  // Recursive estimator only.
  std::size_t dropped_rows = 0;
  std::size_t nodes = 0;
  std::size_t exact_buckets = 0;
  std::size_t forced_leaves = 0;  // nodes above the base size summed at the depth limit
  std::size_t max_depth = 0;
  std::size_t depth_limit = 0;
  std::size_t base_size = 0;
  std::size_t bucket_count = 0;
  double rho = 0.0;
};

std::size_t oneshot_sample_count(std::size_t d, double p, double gamma, double c_m);

// m draws with replacement from the distribution probs (sums to 1).
std::vector<std::size_t> draw_importance_sample(const Vector& probs, std::size_t m,
                                                const RandomSource& rng);

// (1/m) sum_j values[i_j] / probs[i_j].
double importance_estimate(const std::vector<std::size_t>& sample, const Vector& probs,
                           const Vector& values);

// Importance sampling by Lewis weights; sensitivities are taken against an
// l_p embedding of A.
TotalResult total_lewis_oneshot(const Matrix& A, const TotalConfig& cfg, const RandomSource& rng,
                                Execution exec = Execution::Parallel);

// Leverage-bucketed recursive estimator; requires p = 1.
TotalResult total_recursive_l1(const Matrix& A, const TotalConfig& cfg, const RandomSource& rng,
                               Execution exec = Execution::Parallel);

TotalResult total_sensitivity(const Matrix& A, const TotalConfig& cfg, const RandomSource& rng,
                              Execution exec = Execution::Parallel);

// ceil(10 r (1 + gamma) gamma^-2 ln(1/delta)).
std::size_t bounded_ratio_sample_size(double r, double gamma, double delta);

// Estimates sum_{i<m} value(i) for positive items whose max/min ratio is at
// most r, from bounded_ratio_sample_size uniform draws with replacement.
double bounded_ratio_mean(std::size_t m, const std::function<double(std::size_t)>& value,
                          double r, double gamma, double delta, const RandomSource& rng);

const char* to_string(TotalMethod method);
TotalMethod parse_total_method(const std::string& name);

}  // namespace lpsens
