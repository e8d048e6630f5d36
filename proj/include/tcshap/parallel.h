#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tcshap {

struct ParallelOptions {
  unsigned threads = 1;
};

inline unsigned DefaultThreadCount() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for every i in [0, n_tasks). Tasks are claimed dynamically, so
// fn must write only to slots owned by i; callers reduce afterwards in index
// order to keep results independent of the thread count.
template <typename Fn>
void ParallelFor(std::size_t n_tasks, const ParallelOptions& opts, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, opts.threads), n_tasks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < n_tasks; i = next++) fn(i);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = n_tasks;
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tcshap
