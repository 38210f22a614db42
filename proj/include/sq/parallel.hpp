#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sq {

// Worker count: SQ_THREADS if set, otherwise the hardware concurrency.
inline int default_thread_count() {
  if (const char* env = std::getenv("SQ_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(chunk_index, begin, end) for consecutive chunks of [0, count).
// Chunks may run concurrently; callers write results into per-chunk slots
// so the combined result does not depend on scheduling.
template <class Fn>
void for_each_chunk(long count, long chunk_size, Fn&& fn) {
  const long chunks = (count + chunk_size - 1) / chunk_size;
  const int workers = static_cast<int>(std::min<long>(default_thread_count(), chunks));
  auto run_chunk = [&](long c) { fn(c, c * chunk_size, std::min(count, (c + 1) * chunk_size)); };
  if (workers <= 1) {
    for (long c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (long c = next++; c < chunks; c = next++) {
        try {
          run_chunk(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace sq
