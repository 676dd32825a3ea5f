#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "lpsens/error.hpp"
#include "lpsens/report.hpp"

using namespace lpsens;

namespace {

SensitivityReport sample_report() {
  SensitivityReport r;
  r.command = "all";
  r.input = "data/with,comma \"quoted\".csv";
  r.n = 4;
  r.d = 2;
  r.p = 1.5;
  r.method = "rowwise";
  r.seed = 18446744073709551615ull;
  r.config = {{"alpha", 10}, {"embed_eps", 0.5}};
  Vector est(4);
  est << 0.1, 1.0 / 3.0, std::numeric_limits<double>::infinity(), 5e-300;
  r.estimates = est;
  r.total = 2.0 / 3.0;
  Vector oracle(4);
  oracle << 0.2, 0.25, 0.5, std::numeric_limits<double>::quiet_NaN();
  r.oracle = oracle;
  r.oracle_total = 0.95;
  r.metrics = log_ratio_metrics(est, oracle);
  r.diagnostics = {{"oracle_calls", 900}, {"neg", -std::numeric_limits<double>::infinity()}};
  r.timings = {{"estimate", 0.125}};
  r.table.columns = {"p", "value"};
  r.table.rows = {{1.0, 0.1}, {2.5, std::nan("")}};
  return r;
}

}  // namespace

TEST_CASE("log ratio metrics") {
  Vector a(4), t(4);
  a << 2, 1, 0, 4;
  t << 1, 1, 1, std::numeric_limits<double>::infinity();
  const ErrorMetrics m = log_ratio_metrics(a, t);
  CHECK(m.compared == 2);
  CHECK(m.max_abs_log_ratio == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(m.mean_abs_log_ratio == doctest::Approx(std::log(2.0) / 2).epsilon(1e-15));
  CHECK_THROWS_AS(log_ratio_metrics(a, Vector::Ones(3)), InputError);
}

TEST_CASE("json round trip") {
  const SensitivityReport r = sample_report();
  const SensitivityReport back = report_from_json(to_json(r));
  CHECK(same_report(r, back));
  CHECK(std::isinf((*back.estimates)(2)));
  CHECK(std::isnan((*back.oracle)(3)));
  CHECK((*back.estimates)(1) == 1.0 / 3.0);
}

TEST_CASE("csv round trip") {
  const SensitivityReport r = sample_report();
  const std::string text = to_csv(r);
  CHECK(text.rfind("section,key,index,value\n", 0) == 0);
  CHECK(same_report(r, report_from_csv(text)));
}

TEST_CASE("same_report notices differences") {
  const SensitivityReport r = sample_report();
  SensitivityReport other = r;
  other.timings[0].second = 9.0;
  CHECK_FALSE(same_report(r, other));
  CHECK(same_report(r, other, true));
  other = r;
  (*other.estimates)(0) = std::nextafter(0.1, 1.0);
  CHECK_FALSE(same_report(r, other, true));
  other = r;
  other.total.reset();
  CHECK_FALSE(same_report(r, other, true));
}

TEST_CASE("save and load by extension") {
  const auto dir = std::filesystem::temp_directory_path();
  const SensitivityReport r = sample_report();
  for (const char* name : {"lpsens_report_test.json", "lpsens_report_test.csv"}) {
    const std::string path = (dir / name).string();
    save_report(path, r);
    CHECK(same_report(r, load_report(path)));
    std::remove(path.c_str());
  }
  CHECK_THROWS_AS(save_report((dir / "report.txt").string(), r), InputError);
  CHECK_THROWS_AS(load_report((dir / "missing_report.json").string()), InputError);
  CHECK_THROWS_AS(report_from_json("{not json"), InputError);
  CHECK_THROWS_AS(report_from_csv("wrong,header\n"), InputError);
}
