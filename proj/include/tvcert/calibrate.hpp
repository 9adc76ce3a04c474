#pragma once
// Simple convex shapes, their Cheeger ratio lambda_G = P(G) / |G|, the
// curvature condition sup kappa <= lambda_G, calibration fields and a
// numerical calibrability verdict.

#include <optional>
#include <string_view>
#include <vector>

#include "tvcert/grid.hpp"
#include "tvcert/subdiff_certify.hpp"

namespace tvcert {

enum class ShapeKind { disc, polygon, stadium };
std::string_view to_string(ShapeKind k);

/// `stadium` is the rectangle size.x by size.y with corners rounded at radius
/// `rounding` (a true stadium when rounding = min(size) / 2).
struct Shape {
  ShapeKind kind = ShapeKind::disc;
  Vec2 center{0.5, 0.5};
  double radius = 0.0;
  std::vector<Vec2> vertices;  // counter-clockwise or clockwise, convex
  Vec2 size;
  double rounding = 0.0;

  static Shape disc(Vec2 center, double radius);
  static Shape polygon(std::vector<Vec2> vertices);
  static Shape stadium(Vec2 center, Vec2 size, double rounding);

  /// Throws std::invalid_argument on degenerate parameters.
  void validate() const;

  double perimeter() const;
  double area() const;
  bool convex() const;
  /// Boundary of class C^{1,1} (no sharp corners).
  bool c11() const;
  /// Essential sup of the boundary curvature; +inf with sharp corners.
  double max_curvature() const;
  /// Negative inside.
  double signed_distance(Vec2 p) const;
  /// Dilation by t about the origin.
  Shape scaled(double t) const;
};

double cheeger_ratio(const Shape& shape);

enum class Condition { holds, fails, undefined };
std::string_view to_string(Condition c);

Condition curvature_condition(const Shape& shape);

/// Rounding radius at which a length1 x length2 rounded rectangle meets
/// 1/rho = P/|G| with equality; the condition holds iff rho >= rho_star.
double rho_star(double length1, double length2);

/// Anti-aliased indicator clamp(1/2 - d / (3h), 0, 1) on the mask.
ScalarField rasterize(const Shape& shape, const DomainPtr& domain);

/// Throws std::invalid_argument unless the rasterized support stays at least
/// one ramp width away from the exterior of the mask.
void require_inside(const Shape& shape, const GridDomain& domain);

/// Disc: the analytic field -(x - c)/R inside, -R (x - c)/|x - c|^2 outside,
/// sampled at the face midpoints. Other shapes: the dual field of the ROF
/// problem for chi_G with lambda = lambda_G. Always projected to the unit
/// ball and truncated to zero-extension compatibility.
VectorField calibration_field(const Shape& shape, const DomainPtr& domain,
                              const RofOptions& rof = {1e-6, 200000, 10});

struct CalibrationTolerances {
  double tol_f = 1e-9;         // sup-norm excess
  double tol_identity = 5e-2;  // relative L2 residual of -div xi = lambda_G on the core of G
  double tol_t = 5e-2;         // L1(|Du|) alignment of T xi with nu_G
  double band_pixels = 3.0;
  double tol_gap = 1e-6;       // ROF tolerance for non-disc shapes
};

struct CalibrabilityReport {
  Shape shape;
  // analytic
  double lambda_g = 0.0;
  double max_curvature = 0.0;
  bool convex = false;
  bool c11 = false;
  Condition analytic = Condition::undefined;
  std::optional<double> rho_star;
  // numerical
  std::string_view field_source;  // "analytic" or "rof"
  double lambda_h = 0.0;          // TV_h(chi) / <chi, 1>
  double feasibility = 0.0;
  bool zero_ext_ok = false;
  double identity_residual = 0.0;
  /// (max - min) of -div xi over the core of G, relative to lambda_G; diagnostic only.
  double flatness = 0.0;
  /// max |div_h xi| on exterior pixels at least two pixels away from G.
  double exterior_divergence = 0.0;
  double trace_alignment = 0.0;
  bool trace_converged = false;
  double trace_gap = 0.0;
  bool numerical_certified = false;
  /// Analytic condition holds exactly when the numerical certificate passes.
  bool agree = false;
  CalibrationTolerances tols;
};

CalibrabilityReport calibrability_verdict(const Shape& shape, const DomainPtr& domain,
                                          const CalibrationTolerances& tols = {});

}  // namespace tvcert
