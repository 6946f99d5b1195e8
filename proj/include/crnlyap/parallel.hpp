#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace crnlyap {

/// Worker count: `requested` if positive, else CRN_LYAP_JOBS if it parses to a
/// positive integer, else the hardware concurrency (at least 1).
std::size_t resolve_jobs(std::optional<int> requested = std::nullopt);

/// Evaluates fn(0), ..., fn(count - 1) on up to `jobs` threads. Results keep
/// index order. If any call throws, the exception of the lowest index is
/// rethrown after all workers finish, so failures are reproducible too.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, std::size_t jobs, F&& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(std::max<std::size_t>(jobs, 1), count);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace crnlyap
