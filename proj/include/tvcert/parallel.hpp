#pragma once
// Chunked parallel loops over pixel ranges. Chunk boundaries depend only on n,
// so elementwise results never depend on the thread count.

#include <algorithm>
#include <cstddef>

namespace tvcert {

/// Thread cap from TVCERT_THREADS (unset or invalid: all available).
int thread_count();

template <class Fn>
void parallel_chunks(std::size_t n, Fn&& fn) {
  constexpr std::size_t kChunk = 1 << 15;
  const std::ptrdiff_t chunks = static_cast<std::ptrdiff_t>((n + kChunk - 1) / kChunk);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (chunks > 1)
#endif
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    fn(begin, std::min(n, begin + kChunk));
  }
}

}  // namespace tvcert
