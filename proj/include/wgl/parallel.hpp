#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace wgl {

/// Runs body(shard_begin, shard_end) over [0, count) split into contiguous
/// shards, one per worker. Results must be written to disjoint slots; the
/// caller merges in index order, so output never depends on scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    body(std::size_t{0}, count);
    return;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, w, lo, hi] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace wgl
