#pragma once

#include <cstddef>
#include <functional>

namespace gsdscope {

/// Worker count: hardware concurrency capped by the GSDSCOPE_THREADS
/// environment variable (values < 1 mean serial).
std::size_t thread_count();

/// Runs fn(i) for i in [0, n). Work items must write to disjoint slots;
/// callers own any reduction so results stay independent of the schedule.
/// Nested calls from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace gsdscope
