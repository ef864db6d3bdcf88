#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace gdoc {

/// Worker count used by parallel_for; 0 selects std::thread::hardware_concurrency().
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, n) on up to thread_count() threads with static chunking. Each index
/// runs exactly once; the first exception (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gdoc
