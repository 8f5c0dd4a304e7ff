#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace fsll {

/// Worker count from FSLL_THREADS (default 1). Results never depend on it.
inline int thread_count() {
  if (const char* env = std::getenv("FSLL_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 256);
  }
  return 1;
}

/// Splits [0, n) into contiguous ranges and runs fn(begin, end, part) on each.
/// Runs inline when one worker is configured or n is below min_parallel.
template <class Fn>
void parallel_ranges(std::size_t n, std::size_t min_parallel, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(thread_count());
  if (workers <= 1 || n < min_parallel) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  const std::size_t parts = std::min(workers, n);
  const std::size_t chunk = (n + parts - 1) / parts;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(parts);
  pool.reserve(parts);
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t b = p * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, &errors, b, e, p] {
      try {
        fn(b, e, p);
      } catch (...) {
        errors[p] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace fsll
