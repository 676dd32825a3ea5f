#include "lpsens/kernels.hpp"

#include <exception>

#include <omp.h>

namespace lpsens {

void parallel_for(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body) {
  if (exec == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(lpsens_parallel_for_failure)
      {
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

int max_threads() {
  return omp_get_max_threads();
}

}  // namespace lpsens
