#pragma once

#include <cstddef>
#include <functional>

namespace muslx {

/// Worker count: MUSLX_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Runs fn(0..count-1) on up to worker_count() threads. Work items must not
/// share mutable state; the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace muslx
