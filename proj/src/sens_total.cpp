#include "lpsens/sens_total.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lpsens/error.hpp"
#include "lpsens/leverage.hpp"
#include "lpsens/lewis.hpp"

namespace lpsens {

namespace {

void check_common(const Matrix& A, const TotalConfig& cfg) {
  validate(A);
  if (!(cfg.p >= 1.0) || !std::isfinite(cfg.p)) throw InputError("total: p must be >= 1");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw InputError("total: gamma must lie in (0, 1)");
  require_full_column_rank(A);
}

std::vector<std::size_t> distinct(std::vector<std::size_t> rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

// Sensitivities against `solver` at the listed rows of A, scattered into a
// length-n vector that is zero elsewhere.
Vector scattered_sensitivities(const Matrix& A, const HyperplaneSolver& solver,
                               const std::vector<std::size_t>& rows, Execution exec) {
  const Vector scores = solver.sensitivities(take_rows(A, rows), exec);
  Vector out = Vector::Zero(A.rows());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out(static_cast<Eigen::Index>(rows[k])) = scores(static_cast<Eigen::Index>(k));
  }
  return out;
}

}  // namespace

std::size_t oneshot_sample_count(std::size_t d, double p, double gamma, double c_m) {
  const double m = c_m * std::pow(static_cast<double>(d), std::abs(1.0 - p / 2.0)) /
                   (gamma * gamma);
  return static_cast<std::size_t>(std::ceil(m - 1e-9));
}

std::vector<std::size_t> draw_importance_sample(const Vector& probs, std::size_t m,
                                                const RandomSource& rng) {
  if (probs.size() == 0) throw InputError("draw_importance_sample: empty distribution");
  std::vector<double> cum(static_cast<std::size_t>(probs.size()));
  std::partial_sum(probs.data(), probs.data() + probs.size(), cum.begin());
  const double total = cum.back();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InputError("draw_importance_sample: probabilities must have a positive finite sum");
  }
  Engine eng = rng.engine();
  std::vector<std::size_t> out(m);
  for (auto& idx : out) {
    const double u = uniform01(eng) * total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    idx = std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
  }
  return out;
}

double importance_estimate(const std::vector<std::size_t>& sample, const Vector& probs,
                           const Vector& values) {
  if (sample.empty()) throw InputError("importance_estimate: empty sample");
  double sum = 0.0;
  for (std::size_t i : sample) {
    const auto k = static_cast<Eigen::Index>(i);
    sum += values(k) / probs(k);
  }
  return sum / static_cast<double>(sample.size());
}

TotalResult total_lewis_oneshot(const Matrix& A, const TotalConfig& cfg, const RandomSource& rng,
                                Execution exec) {
  check_common(A, cfg);
  if (!(cfg.sample_constant > 0.0)) throw InputError("total: sample constant must be positive");
  const auto d = static_cast<std::size_t>(A.cols());

  LewisConfig lewis_cfg;
  lewis_cfg.p = cfg.p;
  const WeightVector lewis = lewis_weights(A, lewis_cfg);
  // The weights sum to d at convergence; dividing by the actual sum keeps v a
  // distribution when the iteration stopped at tolerance.
  const Vector v = lewis.values / lewis.sum();

  const Matrix SA = full_rank_embedding(A, lewis, cfg.embed_eps, rng, cfg.embed_constant);
  const HyperplaneSolver solver(SA, cfg.p);

  const std::size_t m = oneshot_sample_count(d, cfg.p, cfg.gamma, cfg.sample_constant);
  const std::vector<std::size_t> sample = draw_importance_sample(v, m, rng.split(stage::kSampling));
  const std::vector<std::size_t> rows = distinct(sample);
  const Vector values = scattered_sensitivities(A, solver, rows, exec);

  TotalResult out;
  out.estimate = importance_estimate(sample, v, values);
  out.samples = m;
  out.distinct_rows = rows.size();
  out.oracle_calls = rows.size();
  out.embedding_rows = static_cast<std::size_t>(SA.rows());
  return out;
}

namespace {

struct RecursionPlan {
  const Matrix& A;
  const Matrix& SA;  // constant-factor embedding concatenated at every node
  double rho;
  double log_inv_delta;
  double sample_constant;
  std::size_t base_size;
  std::size_t bucket_count;
  std::size_t depth_limit;
  Vector coefficients;  // estimate = sum_i coefficients_i * sigma_i
  TotalResult* stats;
};

std::size_t bucket_of(double tau, std::size_t bucket_count) {
  if (!(tau > 0.0)) return bucket_count - 1;
  const double k = std::ceil(-std::log2(tau));
  if (k <= 1.0) return 0;
  if (k >= static_cast<double>(bucket_count)) return bucket_count - 1;
  return static_cast<std::size_t>(k) - 1;
}

void recurse(RecursionPlan& plan, const std::vector<std::size_t>& M, std::size_t depth,
             double multiplier, const RandomSource& rng) {
  if (depth > plan.depth_limit) {
    throw InternalError("recursive total: depth " + std::to_string(depth) +
                        " exceeds the bound " + std::to_string(plan.depth_limit));
  }
  TotalResult& stats = *plan.stats;
  ++stats.nodes;
  stats.max_depth = std::max(stats.max_depth, depth);
  if (M.size() <= plan.base_size || depth == plan.depth_limit) {
    if (M.size() > plan.base_size) ++stats.forced_leaves;
    for (std::size_t i : M) plan.coefficients(static_cast<Eigen::Index>(i)) += multiplier;
    return;
  }

  const Matrix C = stack_rows(take_rows(plan.A, M), plan.SA);
  const Vector tau = leverage_exact(C).values;
  std::vector<std::vector<std::size_t>> buckets(plan.bucket_count);
  for (std::size_t k = 0; k < M.size(); ++k) {
    buckets[bucket_of(tau(static_cast<Eigen::Index>(k)), plan.bucket_count)].push_back(M[k]);
  }

  const double r_real = plan.sample_constant * std::sqrt(static_cast<double>(C.rows())) *
                        (1.0 + plan.rho) / (plan.rho * plan.rho) * plan.log_inv_delta;
  const auto r = static_cast<std::size_t>(std::max(1.0, std::ceil(r_real)));
  const double scaled = multiplier * (1.0 + plan.rho);
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    const std::vector<std::size_t>& Mb = buckets[b];
    if (Mb.empty()) continue;
    if (r >= Mb.size()) {
      // Sampling r rows would not shrink the bucket; it is summed exactly.
      ++stats.exact_buckets;
      for (std::size_t i : Mb) plan.coefficients(static_cast<Eigen::Index>(i)) += scaled;
      continue;
    }
    const RandomSource child = rng.split(b);
    Engine eng = child.split(stage::kSampling).engine();
    std::vector<std::size_t> sampled(r);
    for (auto& idx : sampled) idx = Mb[uniform_index(eng, Mb.size())];
    stats.samples += r;
    recurse(plan, sampled, depth + 1,
            scaled * static_cast<double>(Mb.size()) / static_cast<double>(r),
            child.split(stage::kRecursion));
  }
}

}  // namespace

TotalResult total_recursive_l1(const Matrix& A, const TotalConfig& cfg, const RandomSource& rng,
                               Execution exec) {
  check_common(A, cfg);
  if (cfg.p != 1.0) throw InputError("total: recursive_l1 requires p = 1");
  const RecursiveConstants& k = cfg.recursive;
  if (!(k.rho > 0.0 && k.sample > 0.0 && k.base >= 0.0 && k.buckets > 0.0)) {
    throw InputError("total: recursive constants must be positive");
  }
  const auto n = static_cast<double>(A.rows());
  const auto d = static_cast<double>(A.cols());
  if (cfg.gamma < 1.0 / (n * n * n)) throw InputError("total: gamma must be at least n^-3");

  const double depth_bound = 1.0 + std::log(std::log(2.0 * n + 2.0 * d * std::log(d)));
  const double rho = cfg.gamma / (k.rho * depth_bound);
  const auto bucket_count = static_cast<std::size_t>(
      std::max(1.0, std::ceil(k.buckets * std::log2(std::max(n, 2.0)))));
  const double delta = 0.01 / std::pow(static_cast<double>(bucket_count), depth_bound);
  const double d4g = std::pow(depth_bound, 4.0) / (cfg.gamma * cfg.gamma);
  const auto base_size =
      static_cast<std::size_t>(std::ceil(k.base * d4g * std::max(d4g, std::sqrt(d))));

  LewisConfig lewis_cfg;
  lewis_cfg.p = 1.0;
  const WeightVector lewis = lewis_weights(A, lewis_cfg);
  const Matrix SA = full_rank_embedding(A, lewis, 0.5, rng.split(stage::kAuxEmbedding),
                                        cfg.embed_constant);
  const Matrix SpA = full_rank_embedding(A, lewis, std::min(rho, 0.5), rng, cfg.embed_constant);

  const Vector tau = leverage_exact(A).values;
  const double floor = std::pow(n, -10.0);
  std::vector<std::size_t> kept;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (tau(i) >= floor) kept.push_back(static_cast<std::size_t>(i));
  }

  TotalResult out;
  out.dropped_rows = static_cast<std::size_t>(A.rows()) - kept.size();
  out.depth_limit = static_cast<std::size_t>(std::floor(depth_bound));
  out.base_size = base_size;
  out.bucket_count = bucket_count;
  out.rho = rho;
  out.embedding_rows = static_cast<std::size_t>(SpA.rows());

  RecursionPlan plan{A,         SA,         rho,          std::log(1.0 / delta), k.sample,
                     base_size, bucket_count, out.depth_limit, Vector::Zero(A.rows()), &out};
  recurse(plan, kept, 1, 1.0, rng.split(stage::kRecursion));

  std::vector<std::size_t> rows;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (plan.coefficients(i) > 0.0) rows.push_back(static_cast<std::size_t>(i));
  }
  const HyperplaneSolver solver(SpA, 1.0);
  const Vector values = scattered_sensitivities(A, solver, rows, exec);
  const double s = plan.coefficients.dot(values);
  out.estimate = (1.0 + cfg.gamma) * (s + static_cast<double>(out.dropped_rows) / std::pow(n, 5.0));
  out.distinct_rows = rows.size();
  out.oracle_calls = rows.size();
  return out;
}

TotalResult total_sensitivity(const Matrix& A, const TotalConfig& cfg, const RandomSource& rng,
                              Execution exec) {
  return cfg.method == TotalMethod::RecursiveL1 ? total_recursive_l1(A, cfg, rng, exec)
                                                : total_lewis_oneshot(A, cfg, rng, exec);
}

std::size_t bounded_ratio_sample_size(double r, double gamma, double delta) {
  if (!(r >= 1.0) || !(gamma > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw InputError("bounded_ratio_sample_size: need r >= 1, gamma > 0, delta in (0, 1)");
  }
  return static_cast<std::size_t>(
      std::ceil(10.0 * r * (1.0 + gamma) / (gamma * gamma) * std::log(1.0 / delta)));
}

double bounded_ratio_mean(std::size_t m, const std::function<double(std::size_t)>& value,
                          double r, double gamma, double delta, const RandomSource& rng) {
  if (m == 0) throw InputError("bounded_ratio_mean: no items");
  const std::size_t size = bounded_ratio_sample_size(r, gamma, delta);
  Engine eng = rng.split(stage::kSampling).engine();
  double sum = 0.0;
  for (std::size_t k = 0; k < size; ++k) sum += value(uniform_index(eng, m));
  return static_cast<double>(m) / static_cast<double>(size) * sum;
}

const char* to_string(TotalMethod method) {
  return method == TotalMethod::RecursiveL1 ? "recursive_l1" : "lewis_oneshot";
}

TotalMethod parse_total_method(const std::string& name) {
  if (name == "lewis_oneshot") return TotalMethod::LewisOneshot;
  if (name == "recursive_l1") return TotalMethod::RecursiveL1;
  throw InputError("unknown total method '" + name + "'");
}

}  // namespace lpsens
