// Chunked parallel loops with a deterministic reduction order.
//
// Work over [0, n) is split into a fixed number of chunks that does not
// depend on the thread count, so per-chunk accumulators can be reduced
// in index order and results are identical for any number of threads
// (including the serial path used as a reference in tests).
#pragma once

#include <cstdint>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gean {

// Number of chunks used by all chunked loops. Fixed so that reduction
// order is independent of the OpenMP thread count.
inline constexpr int kParallelChunks = 32;

bool parallel_enabled();
void set_parallel_enabled(bool on);

// Splits [0, n) into kParallelChunks contiguous ranges and calls
// f(chunk_index, begin, end) for each. Chunks run in parallel when
// OpenMP is available and parallelism is enabled; each chunk itself
// is processed in index order.
template <typename F>
void for_each_chunk(std::int64_t n, F&& f, bool parallel = true) {
  const int chunks = kParallelChunks;
  const std::int64_t per = (n + chunks - 1) / chunks;
  const bool par = parallel && parallel_enabled();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (par)
#endif
  for (int c = 0; c < chunks; ++c) {
    const std::int64_t begin = static_cast<std::int64_t>(c) * per;
    const std::int64_t end = begin + per < n ? begin + per : n;
    if (begin < end) f(c, begin, end);
  }
  (void)par;
}

// Convenience wrapper: f(i) for each i in [0, n), chunked as above.
template <typename F>
void parallel_for(std::int64_t n, F&& f, bool parallel = true) {
  for_each_chunk(
      n,
      [&](int, std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) f(i);
      },
      parallel);
}

}  // namespace gean
