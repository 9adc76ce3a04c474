#include "tvcert/kernels.hpp"

#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace tvcert::kernels {

namespace {

using namespace detail;

constexpr KernelTable kScalar{
    "scalar",          scalar_forward_gradient, scalar_backward_divergence,
    scalar_pixel_norm, scalar_ascent_project,   scalar_project_ball,
    scalar_axpy,       scalar_extrapolate,      scalar_stencil,
};

#if defined(TVCERT_HAVE_AVX2)
constexpr KernelTable kAvx2{
    "avx2",          avx2_forward_gradient, avx2_backward_divergence,
    avx2_pixel_norm, avx2_ascent_project,   avx2_project_ball,
    avx2_axpy,       avx2_extrapolate,      avx2_stencil,
};
#endif

const KernelTable& select() {
  if (const char* env = std::getenv("TVCERT_SIMD"); env && std::string_view(env) == "scalar")
    return kScalar;
  if (const KernelTable* t = avx2_table()) return *t;
  return kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(TVCERT_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace tvcert::kernels
