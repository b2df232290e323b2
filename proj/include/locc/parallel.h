#pragma once

// Minimal fork-join helper. LOCC_LAB_THREADS caps the worker count.

#include <cstddef>
#include <functional>

namespace locc {

/// Worker count: min(hardware threads, LOCC_LAB_THREADS if set and positive).
unsigned worker_count();

/// Calls body(i) for i in [0, count). Exceptions are rethrown on the calling
/// thread (the first one by index).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace locc
