#pragma once
// Data-parallel inner loops. Every kernel has a scalar reference implementation
// and, on x86-64, an AVX2 variant that produces bit-identical results (no FMA
// contraction, identical operation order). The active table is chosen once at
// first use from the CPU features; TVCERT_SIMD=scalar forces the reference path.
//
// All kernels operate on the half-open pixel range [begin, end) of a row-major
// H x W plane of n = H * W entries.

#include <cstddef>
#include <string_view>

namespace tvcert::kernels {

struct KernelTable {
  std::string_view name;

  // out_x[p] = (u[p+1] - u[p]) * valid_x[p] * inv_h, out_y likewise with p+W.
  void (*forward_gradient)(const double* u, const double* valid_x, const double* valid_y,
                           double inv_h, std::size_t width, std::size_t n, std::size_t begin,
                           std::size_t end, double* out_x, double* out_y);

  // out[p] = (gx[p] vx[p] - gx[p-1] vx[p-1] + gy[p] vy[p] - gy[p-W] vy[p-W]) * inv_h
  void (*backward_divergence)(const double* gx, const double* gy, const double* valid_x,
                              const double* valid_y, double inv_h, std::size_t width,
                              std::size_t n, std::size_t begin, std::size_t end, double* out);

  // out[p] = sqrt(ax[p]^2 + ay[p]^2)
  void (*pixel_norm)(const double* ax, const double* ay, std::size_t begin, std::size_t end,
                     double* out);

  // g <- P(g + step * w) masked by the face validity, P the projection onto
  // the closed unit ball of R^2.
  void (*ascent_project)(double* gx, double* gy, const double* wx, const double* wy, double step,
                         const double* valid_x, const double* valid_y, std::size_t begin,
                         std::size_t end);

  // g <- g / max(1, |g|)
  void (*project_ball)(double* gx, double* gy, std::size_t begin, std::size_t end);

  // out[p] = a[p] + c * b[p]
  void (*axpy)(const double* a, const double* b, double c, std::size_t begin, std::size_t end,
               double* out);

  // out[p] = a[p] + beta * (a[p] - b[p])
  void (*extrapolate)(const double* a, const double* b, double beta, std::size_t begin,
                      std::size_t end, double* out);

  // out[p] = sum_t weights[t] * in[p + offsets[t]], accumulated in tap order.
  // Caller guarantees every p + offsets[t] lies inside the plane.
  void (*stencil)(const double* in, const std::ptrdiff_t* offsets, const double* weights,
                  std::size_t taps, std::size_t begin, std::size_t end, double* out);
};

const KernelTable& scalar_table();

/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// Table used by the library.
const KernelTable& active();

}  // namespace tvcert::kernels
