#pragma once
#include <cstddef>
#include <limits>

namespace tvcert::kernels::detail {

/// Ball projections divide by |g| (1 + 8 eps), so the stored vector still has
/// norm <= 1 after rounding.
inline constexpr double kBallGuard = 1.0 + 8.0 * std::numeric_limits<double>::epsilon();

void scalar_forward_gradient(const double* u, const double* valid_x, const double* valid_y,
                             double inv_h, std::size_t width, std::size_t n, std::size_t begin,
                             std::size_t end, double* out_x, double* out_y);
void scalar_backward_divergence(const double* gx, const double* gy, const double* valid_x,
                                const double* valid_y, double inv_h, std::size_t width,
                                std::size_t n, std::size_t begin, std::size_t end, double* out);
void scalar_pixel_norm(const double* ax, const double* ay, std::size_t begin, std::size_t end,
                       double* out);
void scalar_ascent_project(double* gx, double* gy, const double* wx, const double* wy,
                           double step, const double* valid_x, const double* valid_y,
                           std::size_t begin, std::size_t end);
void scalar_project_ball(double* gx, double* gy, std::size_t begin, std::size_t end);
void scalar_axpy(const double* a, const double* b, double c, std::size_t begin, std::size_t end,
                 double* out);
void scalar_extrapolate(const double* a, const double* b, double beta, std::size_t begin,
                        std::size_t end, double* out);
void scalar_stencil(const double* in, const std::ptrdiff_t* offsets, const double* weights,
                    std::size_t taps, std::size_t begin, std::size_t end, double* out);

#if defined(TVCERT_HAVE_AVX2)
void avx2_forward_gradient(const double* u, const double* valid_x, const double* valid_y,
                           double inv_h, std::size_t width, std::size_t n, std::size_t begin,
                           std::size_t end, double* out_x, double* out_y);
void avx2_backward_divergence(const double* gx, const double* gy, const double* valid_x,
                              const double* valid_y, double inv_h, std::size_t width,
                              std::size_t n, std::size_t begin, std::size_t end, double* out);
void avx2_pixel_norm(const double* ax, const double* ay, std::size_t begin, std::size_t end,
                     double* out);
void avx2_ascent_project(double* gx, double* gy, const double* wx, const double* wy,
                         double step, const double* valid_x, const double* valid_y,
                         std::size_t begin, std::size_t end);
void avx2_project_ball(double* gx, double* gy, std::size_t begin, std::size_t end);
void avx2_axpy(const double* a, const double* b, double c, std::size_t begin, std::size_t end,
               double* out);
void avx2_extrapolate(const double* a, const double* b, double beta, std::size_t begin,
                      std::size_t end, double* out);
void avx2_stencil(const double* in, const std::ptrdiff_t* offsets, const double* weights,
                  std::size_t taps, std::size_t begin, std::size_t end, double* out);
#endif

}  // namespace tvcert::kernels::detail
