#include "dnspec/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace dnspec {

namespace {
int g_threads = 1;
}

void set_thread_count(int k) { g_threads = std::max(1, k); }
int thread_count() { return g_threads; }

namespace detail {

std::size_t chunk_count(std::size_t total) {
  return total == 0 ? 0 : (total + kChunk - 1) / kChunk;
}

void run_chunks(std::size_t total,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t nchunks = chunk_count(total);
  if (nchunks == 0) return;
  const int workers = std::min<std::size_t>(g_threads, nchunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      fn(c, c * kChunk, std::min(total, (c + 1) * kChunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= nchunks) break;
      fn(c, c * kChunk, std::min(total, (c + 1) * kChunk));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

}  // namespace detail
}  // namespace dnspec
