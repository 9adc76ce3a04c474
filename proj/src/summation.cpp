#include "tvcert/summation.hpp"

#include <cstdlib>
#include <string>

#include "tvcert/parallel.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace tvcert {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

int thread_count() {
  static const int count = [] {
#if defined(_OPENMP)
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("TVCERT_THREADS")) {
      try {
        const int cap = std::stoi(env);
        if (cap > 0 && cap < n) n = cap;
      } catch (...) {
      }
    }
    return n;
  }();
  return count;
}

}  // namespace tvcert
