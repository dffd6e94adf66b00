#pragma once

#include <cstddef>
#include <functional>

namespace fockprop {

/// Process-wide cap on worker threads. 0 selects hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() workers.
/// Callers write results into per-index slots; any reduction happens
/// afterwards in index order, so outputs do not depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fockprop
