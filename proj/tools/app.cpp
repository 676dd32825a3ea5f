#include "app.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lpsens/csv.hpp"
#include "lpsens/error.hpp"
#include "lpsens/random.hpp"
#include "lpsens/reduce.hpp"
#include "lpsens/regress.hpp"
#include "lpsens/report.hpp"
#include "lpsens/sens_all.hpp"
#include "lpsens/sens_max.hpp"
#include "lpsens/sens_total.hpp"

namespace lpsens::app {

Matrix synthetic_heavy_tailed(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Engine eng = RandomSource(seed, 0x5e17).engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) A(i, j) = normal(eng);
    const double u = 1.0 - uniform01(eng);
    A.row(i) *= std::pow(u, -1.0 / 1.5);
  }
  return A;
}

namespace {

struct Options {
  std::string input;
  double p = 1.0;
  std::size_t alpha = 10;
  std::optional<double> gamma;
  std::string method = "lewis_oneshot";
  std::uint64_t seed = 1;
  bool exact = false;
  std::string out;
  std::size_t repetitions = 9;
  std::string constants;
  std::string alpha_list;
  std::string p_list = "1,1.5,2,2.5,3";
  std::string table_out;
  bool synthetic = false;
  std::size_t rows = 177;
  std::size_t cols = 14;
  std::string b_path;
  std::optional<std::size_t> target_column;
  std::optional<double> lambda;
  bool serial = false;
};

// Overrides for the constants hidden in O(.) terms.
struct Constants {
  std::size_t signs_per_block = 100;
  double embed_eps = 0.5;
  double embed_constant = kDefaultEmbedConstant;
  double sample_constant = 10.0;
  RecursiveConstants recursive;
};

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InputError("bad number '" + text + "' in " + what);
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) throw InputError(what + " is empty");
  return out;
}

Constants parse_constants(const std::string& text) {
  Constants c;
  if (text.empty()) return c;
  std::map<std::string, std::function<void(double)>> setters = {
      {"signs_per_block",
       [&](double v) {
         if (!(v >= 1.0) || v != std::floor(v)) throw InputError("signs_per_block must be a positive integer");
         c.signs_per_block = static_cast<std::size_t>(v);
       }},
      {"embed_eps", [&](double v) { c.embed_eps = v; }},
      {"embed_constant", [&](double v) { c.embed_constant = v; }},
      {"sample_constant", [&](double v) { c.sample_constant = v; }},
      {"rho", [&](double v) { c.recursive.rho = v; }},
      {"sample", [&](double v) { c.recursive.sample = v; }},
      {"base", [&](double v) { c.recursive.base = v; }},
      {"buckets", [&](double v) { c.recursive.buckets = v; }},
  };
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("--constants entries must look like key=value");
    const std::string key = item.substr(0, eq);
    const auto it = setters.find(key);
    if (it == setters.end()) throw InputError("unknown constant '" + key + "'");
    it->second(parse_number(item.substr(eq + 1), "--constants"));
  }
  return c;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct Context {
  Options opt;
  Constants constants;
  Execution exec = Execution::Parallel;
  Matrix A;
  SensitivityReport report;
};

void attach_oracle(Context& ctx) {
  Stopwatch clock;
  const WeightVector truth = sensitivities_exact(ctx.A, ctx.opt.p, ctx.exec);
  ctx.report.timings.emplace_back("oracle", clock.seconds());
  ctx.report.oracle = truth.values;
  ctx.report.oracle_total = truth.sum();
  ctx.report.oracle_max = truth.max();
}

ErrorMetrics scalar_metric(double approx, double truth) {
  Vector a(1), t(1);
  a << approx;
  t << truth;
  return log_ratio_metrics(a, t);
}

RowwiseConfig rowwise_config(const Context& ctx, std::size_t alpha) {
  RowwiseConfig cfg;
  cfg.p = ctx.opt.p;
  cfg.alpha = alpha;
  cfg.signs_per_block = ctx.constants.signs_per_block;
  cfg.repetitions = ctx.opt.repetitions;
  cfg.embed_eps = ctx.constants.embed_eps;
  cfg.embed_constant = ctx.constants.embed_constant;
  return cfg;
}

void run_all(Context& ctx) {
  SensitivityReport& r = ctx.report;
  const RowwiseConfig cfg = rowwise_config(ctx, ctx.opt.alpha);
  r.config = {{"alpha", static_cast<double>(cfg.alpha)},
              {"repetitions", static_cast<double>(cfg.repetitions)},
              {"signs_per_block", static_cast<double>(cfg.signs_per_block)},
              {"embed_eps", cfg.embed_eps},
              {"embed_constant", cfg.embed_constant}};
  if (!ctx.opt.alpha_list.empty() && !ctx.opt.exact) {
    throw InputError("--alpha-list needs --exact for the log-ratio series");
  }
  const RandomSource rng(ctx.opt.seed);
  Stopwatch clock;
  const RowwiseResult res = sensitivities_rowwise(ctx.A, cfg, rng, ctx.exec);
  r.timings.emplace_back("estimate", clock.seconds());
  r.estimates = res.estimates.values;
  r.diagnostics = {{"oracle_calls", static_cast<double>(res.oracle_calls)},
                   {"embedding_rows", static_cast<double>(res.embedding_rows)},
                   {"blocks_per_repetition", static_cast<double>(res.blocks_per_repetition)}};
  if (!ctx.opt.exact) return;
  attach_oracle(ctx);
  r.metrics = log_ratio_metrics(*r.estimates, *r.oracle);
  if (ctx.opt.alpha_list.empty()) return;
  r.table.columns = {"alpha", "mean_abs_log_ratio", "max_abs_log_ratio", "oracle_calls"};
  for (double a : parse_list(ctx.opt.alpha_list, "--alpha-list")) {
    if (!(a >= 1.0) || a != std::floor(a)) throw InputError("--alpha-list entries must be positive integers");
    const RowwiseResult series =
        sensitivities_rowwise(ctx.A, rowwise_config(ctx, static_cast<std::size_t>(a)), rng, ctx.exec);
    const ErrorMetrics m = log_ratio_metrics(series.estimates.values, *r.oracle);
    r.table.rows.push_back({a, m.mean_abs_log_ratio, m.max_abs_log_ratio,
                            static_cast<double>(series.oracle_calls)});
  }
}

TotalConfig total_config(const Context& ctx, double gamma) {
  TotalConfig cfg;
  cfg.p = ctx.opt.p;
  cfg.gamma = gamma;
  cfg.method = parse_total_method(ctx.opt.method);
  cfg.sample_constant = ctx.constants.sample_constant;
  cfg.embed_eps = ctx.constants.embed_eps;
  cfg.embed_constant = ctx.constants.embed_constant;
  cfg.recursive = ctx.constants.recursive;
  return cfg;
}

void run_total(Context& ctx) {
  SensitivityReport& r = ctx.report;
  const TotalConfig cfg = total_config(ctx, ctx.opt.gamma.value_or(0.2));
  r.method = to_string(cfg.method);
  r.config = {{"gamma", cfg.gamma}, {"embed_eps", cfg.embed_eps},
              {"embed_constant", cfg.embed_constant}};
  if (cfg.method == TotalMethod::LewisOneshot) {
    r.config.emplace_back("sample_constant", cfg.sample_constant);
  } else {
    r.config.emplace_back("rho", cfg.recursive.rho);
    r.config.emplace_back("sample", cfg.recursive.sample);
    r.config.emplace_back("base", cfg.recursive.base);
    r.config.emplace_back("buckets", cfg.recursive.buckets);
  }
  Stopwatch clock;
  const TotalResult res = total_sensitivity(ctx.A, cfg, RandomSource(ctx.opt.seed), ctx.exec);
  r.timings.emplace_back("estimate", clock.seconds());
  r.total = res.estimate;
  r.diagnostics = {{"samples", static_cast<double>(res.samples)},
                   {"distinct_rows", static_cast<double>(res.distinct_rows)},
                   {"oracle_calls", static_cast<double>(res.oracle_calls)},
                   {"embedding_rows", static_cast<double>(res.embedding_rows)}};
  if (cfg.method == TotalMethod::RecursiveL1) {
    r.diagnostics.insert(r.diagnostics.end(),
                         {{"dropped_rows", static_cast<double>(res.dropped_rows)},
                          {"nodes", static_cast<double>(res.nodes)},
                          {"exact_buckets", static_cast<double>(res.exact_buckets)},
                          {"forced_leaves", static_cast<double>(res.forced_leaves)},
                          {"max_depth", static_cast<double>(res.max_depth)},
                          {"depth_limit", static_cast<double>(res.depth_limit)},
                          {"base_size", static_cast<double>(res.base_size)},
                          {"bucket_count", static_cast<double>(res.bucket_count)},
                          {"rho", res.rho}});
  }
  if (!ctx.opt.exact) return;
  attach_oracle(ctx);
  r.metrics = scalar_metric(*r.total, *r.oracle_total);
}

void run_max(Context& ctx) {
  SensitivityReport& r = ctx.report;
  MaxConfig cfg;
  cfg.p = ctx.opt.p;
  cfg.embed_eps = ctx.constants.embed_eps;
  cfg.embed_constant = ctx.constants.embed_constant;
  r.config = {{"embed_eps", cfg.embed_eps}, {"embed_constant", cfg.embed_constant}};
  Stopwatch clock;
  const MaxResult res = max_sensitivity(ctx.A, cfg, RandomSource(ctx.opt.seed), ctx.exec);
  r.timings.emplace_back("estimate", clock.seconds());
  r.max = res.estimate;
  r.diagnostics = {{"raw_max", res.raw_max},
                   {"distortion", res.distortion},
                   {"oracle_calls", static_cast<double>(res.oracle_calls)},
                   {"embedding_rows", static_cast<double>(res.embedding_rows)}};
  if (!ctx.opt.exact) return;
  attach_oracle(ctx);
  r.metrics = scalar_metric(*r.max, *r.oracle_max);
}

void run_exact(Context& ctx) {
  attach_oracle(ctx);
  ctx.report.total = ctx.report.oracle_total;
  ctx.report.max = ctx.report.oracle_max;
}

void run_reduce(Context& ctx) {
  SensitivityReport& r = ctx.report;
  Matrix A = ctx.A;
  std::optional<Vector> b;
  if (ctx.opt.target_column && !ctx.opt.b_path.empty()) {
    throw InputError("--target-column and --b are mutually exclusive");
  }
  if (ctx.opt.target_column) {
    const auto j = static_cast<Eigen::Index>(*ctx.opt.target_column);
    if (j >= A.cols() || A.cols() < 2) throw InputError("--target-column out of range");
    b = A.col(j);
    Matrix rest(A.rows(), A.cols() - 1);
    rest << A.leftCols(j), A.rightCols(A.cols() - j - 1);
    A = rest;
  } else if (!ctx.opt.b_path.empty()) {
    const Matrix bm = load_csv(ctx.opt.b_path);
    if (bm.cols() != 1 || bm.rows() != A.rows()) {
      throw InputError("--b must be a single column with one entry per row of the input");
    }
    b = bm.col(0);
  }
  const double lambda = ctx.opt.lambda.value_or(default_lambda(A));
  r.config = {{"lambda", lambda}};
  Stopwatch clock;
  if (b) {
    r.method = "regression";
    const RegressionReduction red = regression_via_sensitivity(A, *b, ctx.opt.p, lambda);
    r.total = red.opt;
    r.diagnostics = {{"sensitivity", red.sensitivity}};
  } else {
    r.method = "leave_one_out";
    r.estimates = leave_one_out_multiregression(A, ctx.opt.p, lambda, ctx.exec);
    r.diagnostics = {{"sensitivity_calls", static_cast<double>(A.cols())}};
  }
  r.timings.emplace_back("estimate", clock.seconds());
}

void run_bench(Context& ctx) {
  SensitivityReport& r = ctx.report;
  const double gamma = ctx.opt.gamma.value_or(0.5);
  r.method = "lewis_oneshot";
  r.config = {{"gamma", gamma}, {"sample_constant", ctx.constants.sample_constant}};
  r.table.columns = {"p", "total_upper_bound", "brute_force", "approximation",
                     "brute_runtime_s", "approx_runtime_s"};
  const double d = static_cast<double>(ctx.A.cols());
  for (double p : parse_list(ctx.opt.p_list, "--p-list")) {
    Stopwatch brute_clock;
    const double brute = sensitivities_exact(ctx.A, p, ctx.exec).sum();
    const double brute_s = brute_clock.seconds();
    Context local = ctx;
    local.opt.p = p;
    local.opt.method = "lewis_oneshot";
    Stopwatch approx_clock;
    const TotalResult res =
        total_lewis_oneshot(ctx.A, total_config(local, gamma), RandomSource(ctx.opt.seed), ctx.exec);
    const double approx_s = approx_clock.seconds();
    r.table.rows.push_back(
        {p, std::pow(d, std::max(1.0, p / 2.0)), brute, res.estimate, brute_s, approx_s});
    r.diagnostics.emplace_back("distinct_rows_p" + std::to_string(r.table.rows.size()),
                               static_cast<double>(res.distinct_rows));
  }
}

void write_table(const std::string& path, const ReportTable& table) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out.precision(17);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
}

void add_common(CLI::App* sub, Options& o, bool needs_input) {
  auto* in = sub->add_option("--input", o.input, "CSV matrix, one row per data point");
  if (needs_input) in->required();
  sub->add_option("--p", o.p, "p >= 1")->capture_default_str();
  sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
  sub->add_option("--out", o.out, "write the report to a .json or .csv file");
  sub->add_flag("--serial", o.serial, "run the serial reference kernels");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App cli("Estimate l_p sensitivities of the rows of a matrix", "lpsens");
  cli.require_subcommand(1);

  auto* all = cli.add_subcommand("all", "row-wise estimates of every sensitivity");
  add_common(all, o, true);
  all->add_option("--alpha", o.alpha, "block size")->capture_default_str();
  all->add_option("--repetitions", o.repetitions, "odd number of median repetitions")
      ->capture_default_str();
  all->add_option("--alpha-list", o.alpha_list, "comma list of block sizes for a log-ratio series");
  all->add_option("--table-out", o.table_out, "write the series as plain CSV");

  auto* total = cli.add_subcommand("total", "estimate of the total sensitivity");
  add_common(total, o, true);
  total->add_option("--gamma", o.gamma, "accuracy parameter in (0, 1), default 0.2");
  total->add_option("--method", o.method, "lewis_oneshot or recursive_l1")->capture_default_str();

  auto* max = cli.add_subcommand("max", "estimate of the maximum sensitivity");
  add_common(max, o, true);

  auto* exact = cli.add_subcommand("exact", "exact sensitivities from the regression oracle");
  add_common(exact, o, true);

  auto* reduce = cli.add_subcommand("reduce", "l_p regression through sensitivity calls");
  add_common(reduce, o, true);
  reduce->add_option("--b", o.b_path, "single-column CSV target; omit for leave-one-out");
  reduce->add_option("--target-column", o.target_column, "use this input column as the target");
  reduce->add_option("--lambda", o.lambda, "regularization, default 1e-2 ||A||_F / sqrt(nd)");

  auto* bench = cli.add_subcommand("bench", "brute-force vs approximate total over a p sweep");
  add_common(bench, o, false);
  bench->add_option("--p-list", o.p_list, "comma list of p values")->capture_default_str();
  bench->add_option("--gamma", o.gamma, "accuracy parameter, default 0.5");
  bench->add_flag("--synthetic", o.synthetic, "use a heavy-tailed synthetic matrix");
  bench->add_option("--rows", o.rows, "synthetic rows")->capture_default_str();
  bench->add_option("--cols", o.cols, "synthetic columns")->capture_default_str();
  bench->add_option("--table-out", o.table_out, "write the table as plain CSV");

  for (auto* sub : {all, total, max, exact}) {
    sub->add_flag("--exact", o.exact, "also run the exact oracle and report errors");
  }
  for (auto* sub : {all, total, max, exact, reduce, bench}) {
    sub->add_option("--constants", o.constants,
                    "key=value list: signs_per_block, embed_eps, embed_constant, "
                    "sample_constant, rho, sample, base, buckets");
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << cli.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    Context ctx;
    ctx.opt = o;
    ctx.constants = parse_constants(o.constants);
    ctx.exec = o.serial ? Execution::Serial : Execution::Parallel;
    CLI::App* chosen = cli.get_subcommands().front();
    const std::string name = chosen->get_name();

    Stopwatch load_clock;
    if (name == "bench" && o.synthetic) {
      if (!o.input.empty()) throw InputError("--synthetic and --input are mutually exclusive");
      ctx.A = synthetic_heavy_tailed(static_cast<Eigen::Index>(o.rows),
                                     static_cast<Eigen::Index>(o.cols), o.seed);
      ctx.report.input = "synthetic:" + std::to_string(o.rows) + "x" + std::to_string(o.cols);
    } else {
      if (o.input.empty()) throw InputError("--input is required");
      ctx.A = load_csv(o.input);
      ctx.report.input = o.input;
    }
    ctx.report.timings.emplace_back("load", load_clock.seconds());

    SensitivityReport& r = ctx.report;
    r.command = name;
    r.n = static_cast<std::size_t>(ctx.A.rows());
    r.d = static_cast<std::size_t>(ctx.A.cols());
    r.p = o.p;
    r.seed = o.seed;

    if (name == "all") run_all(ctx);
    else if (name == "total") run_total(ctx);
    else if (name == "max") run_max(ctx);
    else if (name == "exact") run_exact(ctx);
    else if (name == "reduce") run_reduce(ctx);
    else run_bench(ctx);

    print_report(out, r);
    if (!o.out.empty()) save_report(o.out, r);
    if (!o.table_out.empty()) write_table(o.table_out, r.table);
    return kExitOk;
  } catch (const NonConvergenceError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace lpsens::app
