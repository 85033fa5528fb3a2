#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "dstbam/random_stream.hpp"

namespace dstbam {

/// Stream of replicate `r` for the experiment role `tag`. Results depend only
/// on (seed, tag, r), never on how replicates are scheduled.
inline RandomStream replicate_stream(std::uint64_t seed, std::uint64_t tag, std::int64_t r) {
  return RandomStream(seed, static_cast<std::uint64_t>(r)).derive(tag);
}

/// Evaluates fn(r) for r in [0, n) on `jobs` threads; slot r of the result
/// holds fn(r). Contiguous blocks per worker; the first exception is rethrown.
template <class T, class Fn>
std::vector<T> map_replicates(std::int64_t n, int jobs, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
  if (n <= 0) return out;
  jobs = static_cast<int>(std::clamp<std::int64_t>(jobs, 1, n));
  if (jobs == 1) {
    for (std::int64_t r = 0; r < n; ++r) out[static_cast<std::size_t>(r)] = fn(r);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    const std::int64_t begin = n * w / jobs;
    const std::int64_t end = n * (w + 1) / jobs;
    workers.emplace_back([&, begin, end] {
      try {
        for (std::int64_t r = begin; r < end; ++r) out[static_cast<std::size_t>(r)] = fn(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace dstbam
