#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace argscape {

/// Runs fn(r) for r in [0, count) on `workers` threads and returns the
/// results indexed by r. Each replicate must derive its randomness from r
/// alone, which makes the output independent of the worker count.
template <typename Result, typename Fn>
std::vector<Result> run_replicates(std::size_t count, std::size_t workers, Fn fn) {
  std::vector<Result> results(count);
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t r = 0; r < count; ++r) results[r] = fn(r);
    return results;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        // Strided assignment keeps the per-thread load balanced.
        for (std::size_t r = w; r < count; r += workers) results[r] = fn(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace argscape
