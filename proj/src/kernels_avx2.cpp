// Compiled with -mavx2 only; never called unless the CPU reports AVX2.
#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>

namespace tvcert::kernels::detail {

namespace {
constexpr std::size_t kLanes = 4;
}

void avx2_forward_gradient(const double* u, const double* valid_x, const double* valid_y,
                           double inv_h, std::size_t width, std::size_t n, std::size_t begin,
                           std::size_t end, double* out_x, double* out_y) {
  const std::size_t vec_end = std::min(end, n > width ? n - width : 0);
  const __m256d ih = _mm256_set1_pd(inv_h);
  std::size_t p = begin;
  for (; p + kLanes <= vec_end; p += kLanes) {
    const __m256d c = _mm256_loadu_pd(u + p);
    const __m256d r = _mm256_loadu_pd(u + p + 1);
    const __m256d b = _mm256_loadu_pd(u + p + width);
    const __m256d dx = _mm256_mul_pd(_mm256_mul_pd(_mm256_sub_pd(r, c), _mm256_loadu_pd(valid_x + p)), ih);
    const __m256d dy = _mm256_mul_pd(_mm256_mul_pd(_mm256_sub_pd(b, c), _mm256_loadu_pd(valid_y + p)), ih);
    _mm256_storeu_pd(out_x + p, dx);
    _mm256_storeu_pd(out_y + p, dy);
  }
  if (p < end) scalar_forward_gradient(u, valid_x, valid_y, inv_h, width, n, p, end, out_x, out_y);
}

void avx2_backward_divergence(const double* gx, const double* gy, const double* valid_x,
                              const double* valid_y, double inv_h, std::size_t width,
                              std::size_t n, std::size_t begin, std::size_t end, double* out) {
  const std::size_t vec_begin = std::min(end, std::max({begin, width, std::size_t{1}}));
  if (begin < vec_begin)
    scalar_backward_divergence(gx, gy, valid_x, valid_y, inv_h, width, n, begin, vec_begin, out);
  const __m256d ih = _mm256_set1_pd(inv_h);
  std::size_t p = vec_begin;
  for (; p + kLanes <= end; p += kLanes) {
    const __m256d ex = _mm256_mul_pd(_mm256_loadu_pd(gx + p), _mm256_loadu_pd(valid_x + p));
    const __m256d wx = _mm256_mul_pd(_mm256_loadu_pd(gx + p - 1), _mm256_loadu_pd(valid_x + p - 1));
    const __m256d sy = _mm256_mul_pd(_mm256_loadu_pd(gy + p), _mm256_loadu_pd(valid_y + p));
    const __m256d ny = _mm256_mul_pd(_mm256_loadu_pd(gy + p - width), _mm256_loadu_pd(valid_y + p - width));
    const __m256d d = _mm256_add_pd(_mm256_sub_pd(ex, wx), _mm256_sub_pd(sy, ny));
    _mm256_storeu_pd(out + p, _mm256_mul_pd(d, ih));
  }
  if (p < end) scalar_backward_divergence(gx, gy, valid_x, valid_y, inv_h, width, n, p, end, out);
}

void avx2_pixel_norm(const double* ax, const double* ay, std::size_t begin, std::size_t end,
                     double* out) {
  std::size_t p = begin;
  for (; p + kLanes <= end; p += kLanes) {
    const __m256d x = _mm256_loadu_pd(ax + p);
    const __m256d y = _mm256_loadu_pd(ay + p);
    _mm256_storeu_pd(out + p, _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y))));
  }
  if (p < end) scalar_pixel_norm(ax, ay, p, end, out);
}

void avx2_ascent_project(double* gx, double* gy, const double* wx, const double* wy, double step,
                         const double* valid_x, const double* valid_y, std::size_t begin,
                         std::size_t end) {
  const __m256d st = _mm256_set1_pd(step);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d guard = _mm256_set1_pd(kBallGuard);
  std::size_t p = begin;
  for (; p + kLanes <= end; p += kLanes) {
    const __m256d x = _mm256_add_pd(_mm256_loadu_pd(gx + p), _mm256_mul_pd(st, _mm256_loadu_pd(wx + p)));
    const __m256d y = _mm256_add_pd(_mm256_loadu_pd(gy + p), _mm256_mul_pd(st, _mm256_loadu_pd(wy + p)));
    const __m256d nrm = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)));
    const __m256d s = _mm256_max_pd(_mm256_mul_pd(nrm, guard), one);
    _mm256_storeu_pd(gx + p, _mm256_mul_pd(_mm256_div_pd(x, s), _mm256_loadu_pd(valid_x + p)));
    _mm256_storeu_pd(gy + p, _mm256_mul_pd(_mm256_div_pd(y, s), _mm256_loadu_pd(valid_y + p)));
  }
  if (p < end) scalar_ascent_project(gx, gy, wx, wy, step, valid_x, valid_y, p, end);
}

void avx2_project_ball(double* gx, double* gy, std::size_t begin, std::size_t end) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d guard = _mm256_set1_pd(kBallGuard);
  std::size_t p = begin;
  for (; p + kLanes <= end; p += kLanes) {
    const __m256d x = _mm256_loadu_pd(gx + p);
    const __m256d y = _mm256_loadu_pd(gy + p);
    const __m256d s = _mm256_max_pd(
        _mm256_mul_pd(_mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y))), guard), one);
    _mm256_storeu_pd(gx + p, _mm256_div_pd(x, s));
    _mm256_storeu_pd(gy + p, _mm256_div_pd(y, s));
  }
  if (p < end) scalar_project_ball(gx, gy, p, end);
}

void avx2_axpy(const double* a, const double* b, double c, std::size_t begin, std::size_t end,
               double* out) {
  const __m256d cc = _mm256_set1_pd(c);
  std::size_t p = begin;
  for (; p + kLanes <= end; p += kLanes)
    _mm256_storeu_pd(out + p, _mm256_add_pd(_mm256_loadu_pd(a + p), _mm256_mul_pd(cc, _mm256_loadu_pd(b + p))));
  if (p < end) scalar_axpy(a, b, c, p, end, out);
}

void avx2_extrapolate(const double* a, const double* b, double beta, std::size_t begin,
                      std::size_t end, double* out) {
  const __m256d bb = _mm256_set1_pd(beta);
  std::size_t p = begin;
  for (; p + kLanes <= end; p += kLanes) {
    const __m256d x = _mm256_loadu_pd(a + p);
    _mm256_storeu_pd(out + p, _mm256_add_pd(x, _mm256_mul_pd(bb, _mm256_sub_pd(x, _mm256_loadu_pd(b + p)))));
  }
  if (p < end) scalar_extrapolate(a, b, beta, p, end, out);
}

void avx2_stencil(const double* in, const std::ptrdiff_t* offsets, const double* weights,
                  std::size_t taps, std::size_t begin, std::size_t end, double* out) {
  std::size_t p = begin;
  for (; p + kLanes <= end; p += kLanes) {
    __m256d acc = _mm256_setzero_pd();
    const double* base = in + p;
    for (std::size_t t = 0; t < taps; ++t)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(weights[t]), _mm256_loadu_pd(base + offsets[t])));
    _mm256_storeu_pd(out + p, acc);
  }
  if (p < end) scalar_stencil(in, offsets, weights, taps, p, end, out);
}

}  // namespace tvcert::kernels::detail
