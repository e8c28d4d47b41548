#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace psmc {

inline unsigned effective_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Splits [0, n) into contiguous chunks and runs fn(chunk_index, begin, end)
// on a pool of worker threads. Chunk boundaries depend only on n and the
// thread count, so shard-local results can be merged deterministically.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
  threads = effective_threads(threads);
  std::size_t chunks = std::min<std::size_t>(threads, n > 0 ? n : 1);
  if (chunks <= 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  const std::size_t base = n / chunks, rem = n % chunks;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(chunks);
  std::size_t begin = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::size_t len = base + (c < rem ? 1 : 0);
    std::size_t end = begin + len;
    pool.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace psmc
