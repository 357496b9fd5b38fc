#pragma once

#include <cstddef>
#include <functional>

namespace pwam::parallel {

// Runs fn(0..count) across up to `threads` workers. Blocks until all tasks
// finish. If tasks throw, the exception raised for the smallest index is
// rethrown, so failure reporting does not depend on scheduling.
void for_each_index(std::size_t count, unsigned threads,
                    const std::function<void(std::size_t)>& fn);

}  // namespace pwam::parallel
