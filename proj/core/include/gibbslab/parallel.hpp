#pragma once

#include <cstddef>
#include <functional>

namespace gibbslab {

/// Worker-pool default: the GIBBSLAB_THREADS environment variable when set,
/// otherwise the number of logical cores.
int default_thread_count();

/// Runs fn(0), ..., fn(count-1) on up to `threads` workers. Jobs must write
/// only to their own slots; any job may throw (the first exception is
/// rethrown after the pool drains).
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace gibbslab
