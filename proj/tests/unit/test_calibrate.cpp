#include <doctest.h>

#include <numbers>

#include "support.hpp"
#include "tvcert/calibrate.hpp"

using namespace tvtest;
using std::numbers::pi;

namespace {

/// Root of A(rho) - rho P(rho) for the rounded rectangle by bisection; the
/// left side is positive at rho = 0 and negative at rho = min / 2.
double rho_star_bisect(double a, double b) {
  auto f = [&](double r) {
    const double p = 2.0 * (a + b) - 8.0 * r + 2.0 * pi * r;
    const double area = a * b - (4.0 - pi) * r * r;
    return area - r * p;
  };
  double lo = 0.0, hi = 0.5 * std::min(a, b);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("closed-form perimeter, area and Cheeger ratio") {
  const Shape disc = Shape::disc({0.5, 0.5}, 0.3);
  CHECK(disc.perimeter() == doctest::Approx(2.0 * pi * 0.3));
  CHECK(disc.area() == doctest::Approx(pi * 0.09));
  CHECK(cheeger_ratio(disc) == doctest::Approx(2.0 / 0.3));

  const Shape square = Shape::polygon({{0.2, 0.2}, {0.7, 0.2}, {0.7, 0.7}, {0.2, 0.7}});
  CHECK(square.perimeter() == doctest::Approx(2.0));
  CHECK(square.area() == doctest::Approx(0.25));
  CHECK(square.convex());
  CHECK_FALSE(square.c11());

  const Shape st = Shape::stadium({0.5, 0.5}, {0.6, 0.2}, 0.05);
  CHECK(st.perimeter() == doctest::Approx(2.0 * 0.8 - 8.0 * 0.05 + 2.0 * pi * 0.05));
  CHECK(st.area() == doctest::Approx(0.12 - (4.0 - pi) * 0.0025));
  CHECK(st.max_curvature() == doctest::Approx(20.0));

  // true stadium: rectangle plus two half discs
  const Shape full = Shape::stadium({0.5, 0.5}, {0.6, 0.2}, 0.1);
  CHECK(full.area() == doctest::Approx(0.4 * 0.2 + pi * 0.01));
  CHECK(full.perimeter() == doctest::Approx(0.8 + 2.0 * pi * 0.1));
}

TEST_CASE("curvature condition and the rounding threshold") {
  CHECK(curvature_condition(Shape::disc({0.5, 0.5}, 0.2)) == Condition::holds);
  CHECK(curvature_condition(Shape::polygon({{0.1, 0.1}, {0.9, 0.1}, {0.5, 0.8}})) == Condition::undefined);
  for (auto [a, b] : {std::pair{0.8, 0.1}, {0.5, 0.5}, {0.6, 0.3}}) {
    const double rs = rho_star(a, b);
    CHECK(rs == doctest::Approx(rho_star_bisect(a, b)).epsilon(1e-10));
    CHECK(curvature_condition(Shape::stadium({0.5, 0.5}, {a, b}, 1.05 * rs)) == Condition::holds);
    CHECK(curvature_condition(Shape::stadium({0.5, 0.5}, {a, b}, 0.95 * rs)) == Condition::fails);
  }
  // a square with side L needs rho >= L / (2 + sqrt(pi))
  CHECK(rho_star(1.0, 1.0) == doctest::Approx(1.0 / (2.0 + std::sqrt(pi))));
}

TEST_CASE("signed distance and scaling") {
  const Shape disc = Shape::disc({0.5, 0.5}, 0.25);
  CHECK(disc.signed_distance({0.5, 0.5}) == doctest::Approx(-0.25));
  CHECK(disc.signed_distance({1.0, 0.5}) == doctest::Approx(0.25));
  const Shape sq = Shape::polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
  CHECK(sq.signed_distance({0.5, 0.25}) == doctest::Approx(-0.25));
  CHECK(sq.signed_distance({2.0, 0.5}) == doctest::Approx(1.0));
  CHECK(sq.signed_distance({2.0, 2.0}) == doctest::Approx(std::sqrt(2.0)));
  const Shape st = Shape::stadium({0.5, 0.5}, {0.4, 0.2}, 0.1);
  CHECK(st.signed_distance({0.5, 0.5}) == doctest::Approx(-0.1));
  // lambda scales as 1/t
  CHECK(cheeger_ratio(st.scaled(2.0)) == doctest::Approx(0.5 * cheeger_ratio(st)));
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(Shape::disc({0.5, 0.5}, -1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Shape::polygon({{0.0, 0.0}, {1.0, 1.0}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Shape::polygon({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Shape::stadium({0.5, 0.5}, {0.4, 0.2}, 0.15).validate(), std::invalid_argument);
  auto d = make_domain(64, 64, 1.0 / 64);
  CHECK_THROWS_AS(require_inside(Shape::disc({0.5, 0.5}, 0.49), *d), std::invalid_argument);
  CHECK_NOTHROW(require_inside(Shape::disc({0.5, 0.5}, 0.3), *d));
}

TEST_CASE("rasterized disc: discrete lambda close to the analytic one") {
  auto d = make_domain(256, 256, 1.0 / 256);
  const Shape disc = Shape::disc({0.5, 0.5}, 0.3);
  const ScalarField chi = rasterize(disc, d);
  double mass = 0.0;
  for (std::size_t k = 0; k < chi.size(); ++k) {
    REQUIRE(chi[k] >= 0.0);
    REQUIRE(chi[k] <= 1.0);
    mass += chi[k];
  }
  const double lambda_h = discrete_tv(chi) / (mass * d->spacing() * d->spacing());
  CHECK(rel(lambda_h, cheeger_ratio(disc)) < 0.05);
}

TEST_CASE("analytic disc field is feasible and calibrates the disc") {
  const int n = 128;
  auto d = make_domain(n, n, 1.0 / n);
  const Shape disc = Shape::disc({0.5, 0.5}, 0.3);
  const VectorField xi = calibration_field(disc, d);
  CHECK(xi.sup_norm() <= 1.0 + 1e-12);
  CHECK(xi.zero_extension_compatible(0.0));
  const ScalarField div = discrete_divergence(xi);
  const double h = d->spacing();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (disc.signed_distance({d->x_center(j), d->y_center(i)}) < -3.0 * h)
        worst = std::max(worst, std::abs(-div(i, j) - cheeger_ratio(disc)));
  CHECK(worst < 1e-9);
}

TEST_CASE("verdict: the disc is certified and agrees with the analytic condition") {
  auto d = make_domain(256, 256, 1.0 / 256);
  const CalibrabilityReport r = calibrability_verdict(Shape::disc({0.5, 0.5}, 0.3), d);
  CHECK(r.analytic == Condition::holds);
  CHECK(r.field_source == "analytic");
  CHECK(r.identity_residual < 1e-9);
  CHECK(r.trace_alignment < 0.05);
  CHECK(r.numerical_certified);
  CHECK(r.agree);
}

TEST_CASE("verdict: an ROF field is feasible and zero-extension compatible") {
  auto d = make_domain(48, 48, 1.0 / 48);
  CalibrationTolerances tols;
  tols.tol_gap = 1e-5;
  const CalibrabilityReport r = calibrability_verdict(Shape::stadium({0.5, 0.5}, {0.5, 0.5}, 0.2), d, tols);
  CHECK(r.field_source == "rof");
  CHECK(r.feasibility <= 1e-9);
  CHECK(r.zero_ext_ok);
  CHECK(r.analytic == Condition::holds);
}
