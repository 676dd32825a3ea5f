// Times the serial reference path against the OpenMP path for the
// oracle-heavy kernels and checks that both return identical numbers.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "lpsens/kernels.hpp"
#include "lpsens/reduce.hpp"
#include "lpsens/regress.hpp"
#include "lpsens/sens_all.hpp"
#include "lpsens/sens_total.hpp"

using namespace lpsens;

namespace {

Matrix gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Engine eng = RandomSource(seed).engine();
  std::normal_distribution<double> normal;
  Matrix A(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) A(i, j) = normal(eng);
  }
  return A;
}

// Best of three runs.
double seconds(const std::function<void()>& f) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < 3; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best,
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

bool same(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

void row(const std::string& name, const std::function<Vector(Execution)>& run) {
  Vector serial, parallel;
  const double ts = seconds([&] { serial = run(Execution::Serial); });
  const double tp = seconds([&] { parallel = run(Execution::Parallel); });
  std::printf("%-28s %10.4f %10.4f %8.2fx  %s\n", name.c_str(), ts, tp, ts / tp,
              same(serial, parallel) ? "identical" : "DIFFERENT");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", max_threads());
  std::printf("%-28s %10s %10s %9s  %s\n", "kernel", "serial_s", "parallel_s", "speedup", "check");

  const Matrix A = gaussian(400, 6, 11);
  for (double p : {1.0, 1.5, 3.0}) {
    row("exact 400x6 p=" + std::to_string(p).substr(0, 3),
        [&](Execution e) { return sensitivities_exact(A, p, e).values; });
  }

  const Matrix B = gaussian(400, 4, 12);
  for (double p : {1.0, 2.5}) {
    RowwiseConfig cfg;
    cfg.p = p;
    cfg.alpha = 20;
    cfg.signs_per_block = 20;
    cfg.repetitions = 3;
    row("rowwise 400x4 p=" + std::to_string(p).substr(0, 3), [&](Execution e) {
      return sensitivities_rowwise(B, cfg, RandomSource(5), e).estimates.values;
    });
  }

  TotalConfig tc;
  tc.p = 3.0;
  row("oneshot total 400x6 p=3", [&](Execution e) {
    Vector v(1);
    v << total_lewis_oneshot(A, tc, RandomSource(7), e).estimate;
    return v;
  });

  const Matrix C = gaussian(300, 12, 13);
  row("leave-one-out 300x12 p=1.5",
      [&](Execution e) { return leave_one_out_multiregression(C, 1.5, 0.1, e); });
  return 0;
}
