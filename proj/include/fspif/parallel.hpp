#pragma once

#include <cstddef>
#include <functional>

namespace fspif {

// Process-wide cap on worker threads (default 1). Work is split into fixed
// contiguous chunks and every output element is written by exactly one
// thread, so results do not depend on the thread count.
void set_max_threads(int n);
int max_threads();

// Calls body(begin, end) on disjoint chunks covering [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace fspif
