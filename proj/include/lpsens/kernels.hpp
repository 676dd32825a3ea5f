#pragma once

#include <cstddef>
#include <functional>

#include "lpsens/regress.hpp"

namespace lpsens {

// Runs body(i) for every i in [0, n). Parallel spreads iterations over OpenMP
// threads with a dynamic schedule; Serial is the reference loop. Each i must
// write only its own output slot, which makes both paths produce identical
// results. The first exception thrown by any iteration is rethrown.
void parallel_for(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body);

int max_threads();

}  // namespace lpsens
