#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace dnspec {

/// Global worker count used by the chunked loops below. 1 = sequential.
void set_thread_count(int k);
int thread_count();

namespace detail {
constexpr std::size_t kChunk = 8192;
// Runs fn(chunk_index, begin, end) for every fixed-size chunk of [0, total).
// The chunk layout never depends on the thread count, so per-chunk results
// can be combined in chunk order and stay bit-identical for any worker count.
void run_chunks(std::size_t total,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);
std::size_t chunk_count(std::size_t total);
}  // namespace detail

/// Deterministic reduction over [0, total): per-chunk sequential fold,
/// chunk results combined in chunk order.
template <class T, class ChunkFn, class CombineFn>
T chunked_reduce(std::size_t total, T init, ChunkFn per_chunk, CombineFn combine) {
  const std::size_t nchunks = detail::chunk_count(total);
  std::vector<T> partial(nchunks, init);
  detail::run_chunks(total, [&](std::size_t c, std::size_t b, std::size_t e) {
    partial[c] = per_chunk(b, e);
  });
  T acc = init;
  for (const T& v : partial) acc = combine(acc, v);
  return acc;
}

/// Parallel map over [0, total); fn writes to disjoint slots only.
template <class Fn>
void parallel_for(std::size_t total, Fn fn) {
  detail::run_chunks(total, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace dnspec
