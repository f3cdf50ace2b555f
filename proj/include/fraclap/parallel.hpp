#pragma once

#include <functional>

namespace fraclap {

// Worker count: hardware concurrency capped by FRACLAP_THREADS when set.
int worker_count();

// Calls fn(i) for i in [0, n); each index exactly once. Callers write results
// per index so the outcome does not depend on the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace fraclap
