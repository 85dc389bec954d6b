#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ifsshadow {

/// Worker count for internal sweeps. Defaults to IFSSHADOW_THREADS when set,
/// else the hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Calls body(i) for i in [0, n) over thread_count() workers using
/// contiguous index blocks. The first exception thrown by any worker is
/// rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// max_i value(i) over [0, n); returns `init` when n == 0. Order independent.
double parallel_max(std::size_t n, const std::function<double(std::size_t)>& value,
                    double init = 0.0);

}  // namespace ifsshadow
