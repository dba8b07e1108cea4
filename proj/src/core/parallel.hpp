#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lbdd {

// Splits [0, count) into contiguous chunks, one per worker, folds each chunk
// into its own accumulator with body(acc, i), then merges the accumulators in
// chunk order. If body depends only on i and merge is associative, the result
// does not depend on the worker count. The first exception is rethrown.
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::uint64_t count, int workers, const Acc& init, Body body, Merge merge) {
  const std::uint64_t w = std::clamp<std::uint64_t>(workers < 1 ? 1 : workers, 1,
                                                    std::max<std::uint64_t>(count, 1));
  std::vector<Acc> parts(w, init);
  if (w == 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(parts[0], i);
    return std::move(parts[0]);
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> threads;
  for (std::uint64_t k = 0; k < w; ++k) {
    threads.emplace_back([&, k] {
      const std::uint64_t lo = count * k / w, hi = count * (k + 1) / w;
      try {
        for (std::uint64_t i = lo; i < hi; ++i) body(parts[k], i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (err) std::rethrow_exception(err);
  Acc out = std::move(parts[0]);
  for (std::uint64_t k = 1; k < w; ++k) merge(out, std::move(parts[k]));
  return out;
}

}  // namespace lbdd
