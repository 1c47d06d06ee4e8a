#pragma once

#include "pruneclust/core.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pruneclust {

/// Worker count from PRUNECLUST_THREADS; 0, unset or unparsable means all cores.
inline unsigned thread_count_from_env() {
  unsigned requested = 0;
  if (const char* env = std::getenv("PRUNECLUST_THREADS")) requested = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Jobs must only
/// write to their own output slot. The first exception thrown is rethrown.
template <typename Fn>
void parallel_for(Index count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = thread_count_from_env();
  threads = static_cast<unsigned>(std::min<Index>(threads, std::max<Index>(count, 1)));
  if (threads <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (Index i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pruneclust
