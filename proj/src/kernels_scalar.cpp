#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace tvcert::kernels::detail {

void scalar_forward_gradient(const double* u, const double* valid_x, const double* valid_y,
                             double inv_h, std::size_t width, std::size_t n, std::size_t begin,
                             std::size_t end, double* out_x, double* out_y) {
  for (std::size_t p = begin; p < end; ++p) {
    const double right = p + 1 < n ? u[p + 1] : u[p];
    const double below = p + width < n ? u[p + width] : u[p];
    out_x[p] = (right - u[p]) * valid_x[p] * inv_h;
    out_y[p] = (below - u[p]) * valid_y[p] * inv_h;
  }
}

void scalar_backward_divergence(const double* gx, const double* gy, const double* valid_x,
                                const double* valid_y, double inv_h, std::size_t width,
                                std::size_t /*n*/, std::size_t begin, std::size_t end,
                                double* out) {
  for (std::size_t p = begin; p < end; ++p) {
    const double west = p >= 1 ? gx[p - 1] * valid_x[p - 1] : 0.0;
    const double north = p >= width ? gy[p - width] * valid_y[p - width] : 0.0;
    out[p] = ((gx[p] * valid_x[p] - west) + (gy[p] * valid_y[p] - north)) * inv_h;
  }
}

void scalar_pixel_norm(const double* ax, const double* ay, std::size_t begin, std::size_t end,
                       double* out) {
  for (std::size_t p = begin; p < end; ++p) out[p] = std::sqrt(ax[p] * ax[p] + ay[p] * ay[p]);
}

void scalar_ascent_project(double* gx, double* gy, const double* wx, const double* wy,
                           double step, const double* valid_x, const double* valid_y,
                           std::size_t begin, std::size_t end) {
  for (std::size_t p = begin; p < end; ++p) {
    const double x = gx[p] + step * wx[p];
    const double y = gy[p] + step * wy[p];
    const double s = std::max(1.0, std::sqrt(x * x + y * y) * kBallGuard);
    gx[p] = x / s * valid_x[p];
    gy[p] = y / s * valid_y[p];
  }
}

void scalar_project_ball(double* gx, double* gy, std::size_t begin, std::size_t end) {
  for (std::size_t p = begin; p < end; ++p) {
    const double s = std::max(1.0, std::sqrt(gx[p] * gx[p] + gy[p] * gy[p]) * kBallGuard);
    gx[p] = gx[p] / s;
    gy[p] = gy[p] / s;
  }
}

void scalar_axpy(const double* a, const double* b, double c, std::size_t begin, std::size_t end,
                 double* out) {
  for (std::size_t p = begin; p < end; ++p) out[p] = a[p] + c * b[p];
}

void scalar_extrapolate(const double* a, const double* b, double beta, std::size_t begin,
                        std::size_t end, double* out) {
  for (std::size_t p = begin; p < end; ++p) out[p] = a[p] + beta * (a[p] - b[p]);
}

void scalar_stencil(const double* in, const std::ptrdiff_t* offsets, const double* weights,
                    std::size_t taps, std::size_t begin, std::size_t end, double* out) {
  for (std::size_t p = begin; p < end; ++p) {
    double acc = 0.0;
    for (std::size_t t = 0; t < taps; ++t)
      acc = acc + weights[t] * in[static_cast<std::ptrdiff_t>(p) + offsets[t]];
    out[p] = acc;
  }
}

}  // namespace tvcert::kernels::detail
