#pragma once

#include <cstddef>
#include <functional>

namespace mamprop {

/// Process-wide cap on worker threads (the CLI's --jobs). Defaults to 1.
void set_max_jobs(unsigned jobs);
unsigned max_jobs();

/// Runs body(i) for i in [0, n). Work is split into contiguous chunks across up to
/// max_jobs() threads; nested calls run inline. If several iterations throw, the
/// exception from the lowest index is rethrown, so failures are schedule-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mamprop
