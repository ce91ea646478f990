#pragma once
#include <cstddef>
#include <functional>

namespace spinwall {

// Worker pool shared by all modules. Thread count is set once from the CLI
// (--threads or SPINWALL_THREADS); default is hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs fn(i) for i in [0, n). Each index is executed by exactly one worker,
// so callers that write only to slot i need no synchronization. Blocks until
// all indices are done. Safe to call with n == 0. Short loops run inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Same contract but always uses the pool (for few coarse-grained tasks).
void parallel_tasks(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace spinwall
