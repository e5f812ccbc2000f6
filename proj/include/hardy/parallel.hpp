#pragma once

#include <functional>

namespace hardy {

/// Worker count for per-item loops; 0 selects the hardware concurrency.
void set_num_threads(int n);
int num_threads();

/// Calls f(i) for i in [0, n) split into contiguous chunks. Items must be
/// independent; results written per index are thread-count independent.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace hardy
