#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace wickgl {

/// Worker count: the explicit request if given, else WICKGL_THREADS, else
/// the hardware concurrency (at least 1).
int resolve_thread_count(std::optional<int> requested = std::nullopt);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.  Work items
/// are claimed dynamically; the exception of the lowest failing index is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace wickgl
