#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <future>
#include <vector>

namespace priordis {

// Runs fn(i) for i in [0, n) on up to `jobs` threads; result i lands in slot
// i, so the output never depends on scheduling.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, Fn fn) {
  std::vector<T> out(n);
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (std::size_t w = 0; w < std::min<std::size_t>(jobs, n); ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) out[i] = fn(i);
    }));
  }
  for (auto& w : workers) w.get();
  return out;
}

}  // namespace priordis
