#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace sdnet {

/// Worker count from SDNET_WORKERS, falling back to the hardware concurrency.
inline std::size_t configured_workers() {
  if (const char* env = std::getenv("SDNET_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Thread budget for data-parallel kernels on the calling thread. Zero means
/// "use configured_workers()". The sweep runner sets this to 1 inside its
/// workers so runs do not oversubscribe.
inline std::size_t& inner_thread_limit() {
  thread_local std::size_t limit = 0;
  return limit;
}

class ScopedThreadLimit {
 public:
  explicit ScopedThreadLimit(std::size_t limit) : saved_(inner_thread_limit()) {
    inner_thread_limit() = limit;
  }
  ~ScopedThreadLimit() { inner_thread_limit() = saved_; }
  ScopedThreadLimit(const ScopedThreadLimit&) = delete;
  ScopedThreadLimit& operator=(const ScopedThreadLimit&) = delete;

 private:
  std::size_t saved_;
};

/// Runs fn(block_index) for every block in [0, n_blocks), possibly in
/// parallel. Blocks are claimed dynamically; fn must only touch per-block
/// state.
template <typename Fn>
void parallel_blocks(std::size_t n_blocks, Fn&& fn) {
  std::size_t threads = inner_thread_limit();
  if (threads == 0) threads = configured_workers();
  threads = std::min(threads, n_blocks);
  if (threads <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    const std::size_t saved = inner_thread_limit();
    inner_thread_limit() = 1;
    for (std::size_t b = next++; b < n_blocks; b = next++) fn(b);
    inner_thread_limit() = saved;
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
}

/// Sum of block_fn(begin, end) over fixed-size index blocks of [0, n). The
/// partition depends only on n and block_size, and partials are combined in
/// block order, so the result is bit-identical for any thread count.
template <typename T, typename BlockFn>
T ordered_block_sum(std::size_t n, std::size_t block_size, BlockFn&& block_fn) {
  if (n == 0) return T{};
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  std::vector<T> partial(n_blocks, T{});
  parallel_blocks(n_blocks, [&](std::size_t b) {
    const std::size_t begin = b * block_size;
    const std::size_t end = std::min(n, begin + block_size);
    partial[b] = block_fn(begin, end);
  });
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

}  // namespace sdnet
