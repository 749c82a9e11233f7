#pragma once

#include <cstdint>
#include <functional>

namespace ksc {

// Runs fn(i) for every i in [0, count) on up to n_threads workers.
// Tasks are claimed dynamically, one index at a time; fn must only write
// state owned by its own index so results never depend on the schedule.
void parallel_for(std::int64_t count, int n_threads,
                  const std::function<void(std::int64_t)>& fn);

// hardware concurrency, clamped to at least 1
int default_thread_count();

}  // namespace ksc
