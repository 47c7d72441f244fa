#pragma once

#include <cstddef>
#include <functional>

namespace delone {

/// Worker count: DELONE_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
std::size_t thread_budget();

/// Runs fn(i) for i in [0, n) on up to thread_budget() threads. If any call
/// throws, the exception from the lowest index is rethrown after all workers
/// finish, so failures do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace delone
