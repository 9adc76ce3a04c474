#include "tvcert/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tvcert/summation.hpp"

namespace tvcert {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double signed_area(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

}  // namespace

std::string_view to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::disc: return "disc";
    case ShapeKind::polygon: return "polygon";
    case ShapeKind::stadium: return "stadium";
  }
  return "?";
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::holds: return "holds";
    case Condition::fails: return "fails";
    case Condition::undefined: return "undefined";
  }
  return "?";
}

Shape Shape::disc(Vec2 center, double radius) {
  Shape s;
  s.kind = ShapeKind::disc;
  s.center = center;
  s.radius = radius;
  s.validate();
  return s;
}

Shape Shape::polygon(std::vector<Vec2> vertices) {
  Shape s;
  s.kind = ShapeKind::polygon;
  s.vertices = std::move(vertices);
  double cx = 0.0;
  double cy = 0.0;
  for (const Vec2& v : s.vertices) {
    cx += v.x;
    cy += v.y;
  }
  if (!s.vertices.empty()) s.center = {cx / s.vertices.size(), cy / s.vertices.size()};
  s.validate();
  return s;
}

Shape Shape::stadium(Vec2 center, Vec2 size, double rounding) {
  Shape s;
  s.kind = ShapeKind::stadium;
  s.center = center;
  s.size = size;
  s.rounding = rounding;
  s.validate();
  return s;
}

void Shape::validate() const {
  switch (kind) {
    case ShapeKind::disc:
      if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("disc radius must be > 0");
      break;
    case ShapeKind::polygon: {
      if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
      if (std::abs(signed_area(vertices)) <= 0.0) throw std::invalid_argument("degenerate polygon");
      break;
    }
    case ShapeKind::stadium:
      if (!(size.x > 0.0) || !(size.y > 0.0)) throw std::invalid_argument("stadium size must be > 0");
      if (rounding < 0.0 || rounding > 0.5 * std::min(size.x, size.y))
        throw std::invalid_argument("stadium rounding must lie in [0, min(size)/2]");
      break;
  }
}

double Shape::perimeter() const {
  switch (kind) {
    case ShapeKind::disc: return 2.0 * kPi * radius;
    case ShapeKind::polygon: {
      double p = 0.0;
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % vertices.size()];
        p += std::hypot(b.x - a.x, b.y - a.y);
      }
      return p;
    }
    case ShapeKind::stadium:
      return 2.0 * (size.x + size.y) - 8.0 * rounding + 2.0 * kPi * rounding;
  }
  return 0.0;
}

double Shape::area() const {
  switch (kind) {
    case ShapeKind::disc: return kPi * radius * radius;
    case ShapeKind::polygon: return std::abs(signed_area(vertices));
    case ShapeKind::stadium: return size.x * size.y - (4.0 - kPi) * rounding * rounding;
  }
  return 0.0;
}

bool Shape::convex() const {
  if (kind != ShapeKind::polygon) return true;
  const double orient = signed_area(vertices) > 0.0 ? 1.0 : -1.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i)
    if (orient * cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) < 0.0) return false;
  return true;
}

bool Shape::c11() const {
  switch (kind) {
    case ShapeKind::disc: return true;
    case ShapeKind::polygon: return false;
    case ShapeKind::stadium: return rounding > 0.0;
  }
  return false;
}

double Shape::max_curvature() const {
  switch (kind) {
    case ShapeKind::disc: return 1.0 / radius;
    case ShapeKind::polygon: return kInf;
    case ShapeKind::stadium: return rounding > 0.0 ? 1.0 / rounding : kInf;
  }
  return kInf;
}

double Shape::signed_distance(Vec2 p) const {
  switch (kind) {
    case ShapeKind::disc: return std::hypot(p.x - center.x, p.y - center.y) - radius;
    case ShapeKind::polygon: {
      const std::size_t n = vertices.size();
      const double orient = signed_area(vertices) > 0.0 ? 1.0 : -1.0;
      double dist = kInf;
      bool inside = true;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        dist = std::min(dist, segment_distance(p, a, b));
        if (orient * cross(a, b, p) < 0.0) inside = false;
      }
      return inside ? -dist : dist;
    }
    case ShapeKind::stadium: {
      const double qx = std::abs(p.x - center.x) - (0.5 * size.x - rounding);
      const double qy = std::abs(p.y - center.y) - (0.5 * size.y - rounding);
      const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
      return outside + std::min(std::max(qx, qy), 0.0) - rounding;
    }
  }
  return kInf;
}

Shape Shape::scaled(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("scale factor must be > 0");
  Shape s = *this;
  s.center = {center.x * t, center.y * t};
  s.radius = radius * t;
  for (Vec2& v : s.vertices) v = {v.x * t, v.y * t};
  s.size = {size.x * t, size.y * t};
  s.rounding = rounding * t;
  return s;
}

double cheeger_ratio(const Shape& shape) { return shape.perimeter() / shape.area(); }

Condition curvature_condition(const Shape& shape) {
  if (!shape.convex()) return Condition::fails;
  if (!shape.c11()) return Condition::undefined;
  const double lambda = cheeger_ratio(shape);
  return shape.max_curvature() <= lambda * (1.0 + 1e-12) ? Condition::holds : Condition::fails;
}

double rho_star(double length1, double length2) {
  if (!(length1 > 0.0) || !(length2 > 0.0)) throw std::invalid_argument("lengths must be > 0");
  const double s = length1 + length2;
  const double k = 4.0 - kPi;
  return (s - std::sqrt(s * s - k * length1 * length2)) / k;
}

ScalarField rasterize(const Shape& shape, const DomainPtr& domain) {
  const GridDomain& d = *domain;
  const double ramp = 3.0 * d.spacing();
  ScalarField chi(domain);
  for (int i = 0; i < d.height(); ++i)
    for (int j = 0; j < d.width(); ++j) {
      if (!d.inside(i, j)) continue;
      const double s = shape.signed_distance({d.x_center(j), d.y_center(i)});
      chi[d.index(i, j)] = std::clamp(0.5 - s / ramp, 0.0, 1.0);
    }
  return chi;
}

void require_inside(const Shape& shape, const GridDomain& d) {
  const double reach = 1.5 * d.spacing();
  bool any = false;
  for (int i = 0; i < d.height(); ++i)
    for (int j = 0; j < d.width(); ++j) {
      if (shape.signed_distance({d.x_center(j), d.y_center(i)}) >= reach) continue;
      any = true;
      if (!d.inside(i, j) || d.exterior_distance()[d.index(i, j)] <= 3)
        throw std::invalid_argument("shape touches the domain boundary");
    }
  if (!any) throw std::invalid_argument("shape does not cover any pixel of the domain");
}

VectorField calibration_field(const Shape& shape, const DomainPtr& domain, const RofOptions& rof) {
  shape.validate();
  const GridDomain& d = *domain;
  require_inside(shape, d);
  if (shape.kind != ShapeKind::disc) {
    const ScalarField chi = rasterize(shape, domain);
    return solve_rof(chi, cheeger_ratio(shape), rof).g;
  }
  const double h = d.spacing();
  const double R = shape.radius;
  auto xi = [&](double x, double y) -> Vec2 {
    const double rx = x - shape.center.x;
    const double ry = y - shape.center.y;
    const double r2 = rx * rx + ry * ry;
    if (r2 <= R * R) return {-rx / R, -ry / R};
    return {-R * rx / r2, -R * ry / r2};
  };
  VectorField g(domain);
  for (int i = 0; i < d.height(); ++i)
    for (int j = 0; j < d.width(); ++j) {
      const std::size_t k = d.index(i, j);
      if (!d.inside(i, j)) continue;
      g.x()[k] = xi((j + 1.0) * h, (i + 0.5) * h).x;
      g.y()[k] = xi((j + 0.5) * h, (i + 1.0) * h).y;
    }
  return project_unit_ball(g.truncated_to_compatible());
}

CalibrabilityReport calibrability_verdict(const Shape& shape, const DomainPtr& domain,
                                          const CalibrationTolerances& tols) {
  shape.validate();
  const GridDomain& d = *domain;
  CalibrabilityReport rep;
  rep.shape = shape;
  rep.tols = tols;
  rep.lambda_g = cheeger_ratio(shape);
  rep.max_curvature = shape.max_curvature();
  rep.convex = shape.convex();
  rep.c11 = shape.c11();
  rep.analytic = curvature_condition(shape);
  if (shape.kind == ShapeKind::stadium) rep.rho_star = rho_star(shape.size.x, shape.size.y);

  const ScalarField chi = rasterize(shape, domain);
  ScalarField ones(domain);
  for (std::size_t k = 0; k < ones.size(); ++k) ones[k] = d.mask()[k] ? 1.0 : 0.0;
  rep.lambda_h = discrete_tv(chi) / inner(chi, ones);

  rep.field_source = shape.kind == ShapeKind::disc ? "analytic" : "rof";
  const VectorField xi = calibration_field(shape, domain, RofOptions{tols.tol_gap, 400000, 10});
  rep.feasibility = std::max(0.0, xi.sup_norm() - 1.0);
  rep.zero_ext_ok = xi.zero_extension_compatible(0.0);

  // -div xi = lambda_G on the core of G: deeper than the band inside G and
  // farther than the band from the exterior of the mask. Outside G the field
  // cannot be divergence-free up to a Neumann box (the flux P(G) has to go
  // somewhere), so the exterior is only reported.
  const ScalarField div = discrete_divergence(xi);
  const double h = d.spacing();
  const double band = tols.band_pixels * h;
  std::vector<double> res;
  std::vector<double> ref;
  double lo = kInf;
  double hi = -kInf;
  for (int i = 0; i < d.height(); ++i)
    for (int j = 0; j < d.width(); ++j) {
      const std::size_t k = d.index(i, j);
      if (!d.inside(i, j) || d.exterior_distance()[k] <= tols.band_pixels) continue;
      const double sd = shape.signed_distance({d.x_center(j), d.y_center(i)});
      if (sd >= 2.0 * h) rep.exterior_divergence = std::max(rep.exterior_divergence, std::abs(div[k]));
      if (sd > -band) continue;
      const double r = -div[k] - rep.lambda_g;
      res.push_back(r * r);
      ref.push_back(rep.lambda_g * rep.lambda_g);
      lo = std::min(lo, -div[k]);
      hi = std::max(hi, -div[k]);
    }
  if (!res.empty()) {
    rep.identity_residual = std::sqrt(pairwise_sum(res) / pairwise_sum(ref));
    rep.flatness = (hi - lo) / rep.lambda_g;
  }

  // T xi . nu_G = 1 on the anti-aliased ring, nu_G = sigma_chi (inward).
  const GradientMeasure mu = gradient_measure(chi, default_eps_zero(chi));
  const double eps0 = 8.0 * h;
  const MollifierSpec spec = make_mollifier_spec(d, eps0, eps0);
  const TraceResult tr = full_trace(xi, mu, spec, kDefaultTraceTol);
  std::vector<double> err(chi.size(), 0.0);
  for (std::size_t k = 0; k < chi.size(); ++k)
    if (mu.supported(k))
      err[k] = mu.weight[k] * std::abs(1.0 - (tr.x[k] * mu.direction_x[k] + tr.y[k] * mu.direction_y[k]));
  const double mass = mu.total_mass();
  rep.trace_alignment = mass > 0.0 ? pairwise_sum(err) / mass : 0.0;
  rep.trace_converged = tr.converged;
  rep.trace_gap = tr.relative_gap();

  rep.numerical_certified = rep.feasibility <= tols.tol_f && rep.zero_ext_ok &&
                            rep.identity_residual <= tols.tol_identity &&
                            rep.trace_alignment <= tols.tol_t;
  rep.agree = (rep.analytic == Condition::holds) == rep.numerical_certified;
  return rep;
}

}  // namespace tvcert
