#pragma once
// Dual vector fields: the W^q(div) norm, unit-ball projection and the
// boundary-aware mollification that produces smooth approximants g_eps with
// ||g_eps||_inf <= ||g||_inf.
//
// Near the boundary every output pixel is averaged over a kernel whose centre
// is pushed inward by alpha * eps along the chart direction, so the kernel
// support never leaves the domain; away from the boundary a plain centred
// kernel is used. The layers are blended with a partition of unity evaluated
// at the output pixel.

#include <cstdint>
#include <vector>

#include "tvcert/grid.hpp"

namespace tvcert {

struct Chart {
  Vec2 center;              // length units
  double half_width = 0.0;  // r: the chart cube is Q_r(center); its core Q' has half-width r/2
  Vec2 inward;              // unit graph direction e_d, pointing into the domain
  double lipschitz = 0.0;   // Lip(gamma) of the boundary graph inside the cube

  double alpha() const { return lipschitz + 2.0; }
};

struct MollifierSpec {
  double epsilon = 0.0;
  std::vector<Chart> charts;
  /// The centred interior layer is used where the distance to the exterior exceeds this band.
  double interior_band = 0.0;

  /// Throws std::invalid_argument when eps >= r / (2(alpha+1)) for some chart,
  /// when eps >= interior_band, or when some boundary pixel lies in no chart core.
  void validate(const GridDomain& domain) const;

  MollifierSpec with_epsilon(double eps) const;
};

/// Charts for a polygonal grid mask: axis-aligned boundary runs get Lip = 0
/// (alpha = 2), convex corner pixels a diagonal chart with Lip = 1 (alpha = 3).
/// Sized so that every eps <= eps_max is admissible.
MollifierSpec make_mollifier_spec(const GridDomain& domain, double epsilon, double epsilon_max);
inline MollifierSpec make_mollifier_spec(const GridDomain& domain, double epsilon) {
  return make_mollifier_spec(domain, epsilon, epsilon);
}

struct PartitionOfUnity {
  struct Layer {
    std::vector<std::uint32_t> pixels;
    std::vector<double> weights;
  };
  std::vector<double> interior;  // per pixel
  std::vector<Layer> charts;     // sparse, one per chart
};

PartitionOfUnity build_partition(const GridDomain& domain, const MollifierSpec& spec);

/// Standard bump exp(1 / (|x|^2 - 1)) on the open unit ball, unnormalized.
double bump(double radius);

struct WqDivNorm {
  double q = 2.0;
  double field_part = 0.0;
  double div_part = 0.0;
  double value() const;
};

WqDivNorm wq_div_norm(const VectorField& g, double q);
WqDivNorm wq_div_distance(const VectorField& a, const VectorField& b, double q);

VectorField project_unit_ball(const VectorField& g);

VectorField mollify_boundary_aware(const VectorField& g, const MollifierSpec& spec);

/// The same shifted averaging applied to a scalar plane (used to compare
/// div(g_eps) with the mollified divergence).
ScalarField mollify_boundary_aware(const ScalarField& s, const MollifierSpec& spec);

/// Total kernel mass seen by each output pixel (sum over layers of zeta times
/// the renormalized kernel mass); 1 up to rounding on every mask pixel.
std::vector<double> mollifier_mass(const GridDomain& domain, const MollifierSpec& spec);

/// Dyadic schedule eps_0, eps_0/2, ... down to (and including) the first value <= h.
std::vector<double> dyadic_schedule(double epsilon0, double spacing);

}  // namespace tvcert
