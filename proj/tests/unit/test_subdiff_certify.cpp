#include <doctest.h>

#include <numbers>

#include "support.hpp"
#include "tvcert/subdiff_certify.hpp"

using namespace tvtest;

namespace {

MollifierSpec spec_for(const GridDomain& d) {
  return make_mollifier_spec(d, 2.0 * d.spacing(), 2.0 * d.spacing());
}

/// Row-constant step a | b at column split; ROF keeps the step and moves
/// both plateaus toward each other by 1 / (2 lambda h n_side).
struct Step {
  int rows, cols, split;
  double a, b;
};

}  // namespace

TEST_CASE("ROF on a row-constant step matches the closed form") {
  const Step s{6, 10, 4, 1.0, 0.0};
  auto d = make_domain(s.rows, s.cols, 0.1);
  ScalarField u0(d);
  for (int i = 0; i < s.rows; ++i)
    for (int j = 0; j < s.cols; ++j) u0(i, j) = j < s.split ? s.a : s.b;
  const double lambda = 10.0;
  const double h = d->spacing();
  const double a = s.a - 1.0 / (2.0 * lambda * h * s.split);
  const double b = s.b + 1.0 / (2.0 * lambda * h * (s.cols - s.split));
  REQUIRE(a > b);
  const RofSolution sol = solve_rof(u0, lambda, RofOptions{1e-12, 200000, 10});
  for (int i = 0; i < s.rows; ++i)
    for (int j = 0; j < s.cols; ++j) CHECK(sol.u(i, j) == doctest::Approx(j < s.split ? a : b).epsilon(1e-6));
  CHECK(sol.gap <= 1e-12 * sol.scale + 1e-14);
  CHECK(sol.g.sup_norm() <= 1.0 + 1e-12);
  CHECK(sol.g.zero_extension_compatible());
  // Optimality pair: 2 lambda (u - u0) = div g.
  const ScalarField div = discrete_divergence(sol.g);
  for (std::size_t k = 0; k < u0.size(); ++k)
    CHECK(2 * lambda * (sol.u[k] - u0[k]) == doctest::Approx(div[k]).epsilon(1e-9));
}

TEST_CASE("ROF on constant data returns the data with g = 0") {
  auto d = make_domain(5, 5, 0.2);
  ScalarField u0(d);
  for (std::size_t k = 0; k < u0.size(); ++k) u0[k] = 0.7;
  const RofSolution sol = solve_rof(u0, 1.0, RofOptions{});
  CHECK(sol.iterations == 0);
  CHECK(sol.gap == 0.0);
  CHECK(sol.g.sup_norm() == 0.0);
  for (std::size_t k = 0; k < u0.size(); ++k) CHECK(sol.u[k] == 0.7);
}

TEST_CASE("ROF: iteration limit carries the last iterate; warm start") {
  std::mt19937_64 rng(41);
  auto d = make_domain(32, 32, 1.0 / 32);
  const ScalarField u0 = random_scalar(d, rng);
  try {
    (void)solve_rof(u0, 1.0, RofOptions{1e-14, 20, 10});
    FAIL("expected IterationLimit");
  } catch (const IterationLimit& e) {
    CHECK(e.last().iterations == 20);
    CHECK(e.gap() > 0.0);
  }
  const RofSolution cold = solve_rof(u0, 1.0, RofOptions{1e-8, 200000, 10});
  const RofSolution warm = solve_rof(u0, 1.0, RofOptions{1e-8, 200000, 10}, &cold.g);
  CHECK(warm.iterations <= cold.iterations);
  ScalarField diff(d);
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = warm.u[k] - cold.u[k];
  CHECK(l2_norm(diff) <= 1e-3 * l2_norm(cold.u));
  CHECK_THROWS_AS(solve_rof(u0, -1.0, RofOptions{}), std::invalid_argument);
}

TEST_CASE("constant triple is certified") {
  auto d = make_domain(16, 16, 1.0 / 16);
  ScalarField u(d), u_star(d);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = 2.0;
  const Certificate c = certify(u, u_star, VectorField(d), spec_for(*d));
  CHECK(c.verdict == Verdict::certified);
  CHECK(c.structure_ok);
  CHECK(c.integral_residual == 0.0);
  CHECK(c.fulltrace_residual == 0.0);
  CHECK(c.criteria_agree);
}

TEST_CASE("ROF solutions are certified and pass the oracle") {
  // Pixel units: with h = 1/16 these lambdas flatten the noise to a constant.
  std::mt19937_64 rng(42);
  auto d = make_domain(16, 16, 1.0);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const ScalarField u0 = random_scalar(d, rng);
    const RofSolution sol = solve_rof(u0, lambda, RofOptions{1e-8, 400000, 10});
    const Certificate c = certify_rof(u0, lambda, sol, spec_for(*d));
    CHECK(c.verdict == Verdict::certified);
    CHECK(c.integral_ok);
    CHECK(c.div_match <= 1e-6);
    const OracleResult r = subgradient_oracle(sol.u, c.u_star, 200, 7);
    CHECK(r.passes(1e-8));
    CHECK(r.samples == 200);
  }
}

TEST_CASE("forged field with sup norm 2 is refuted, and the oracle finds a violation") {
  auto d = make_domain(16, 16, 1.0 / 16);
  ScalarField u(d);
  VectorField g(d);
  for (std::size_t k = 0; k < g.size(); ++k) g.x()[k] = 2.0;
  g = g.truncated_to_compatible();
  const ScalarField div = discrete_divergence(g);
  ScalarField u_star(d);
  for (std::size_t k = 0; k < u.size(); ++k) u_star[k] = -div[k];
  const Certificate c = certify(u, u_star, g, spec_for(*d));
  CHECK(c.feasibility == doctest::Approx(1.0));
  CHECK(c.verdict == Verdict::refuted);
  const OracleResult r = subgradient_oracle(u, u_star, 1000, 3);
  CHECK_FALSE(r.passes(1e-8));
  CHECK(r.worst_family == SampleFamily::piecewise_constant);
}

TEST_CASE("ramp with a field that does not vanish on the boundary is refuted on zero_ext_ok") {
  auto d = make_domain(16, 16, 1.0 / 16);
  ScalarField u(d);
  VectorField g(d);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      u(i, j) = d->x_center(j);
      g.x()[d->index(i, j)] = 1.0;
    }
  const ScalarField div = flux_divergence(g);
  ScalarField u_star(d);
  for (std::size_t k = 0; k < u.size(); ++k) u_star[k] = -div[k];
  const Certificate c = certify(u, u_star, g, spec_for(*d));
  CHECK_FALSE(c.zero_ext_ok);
  CHECK(c.feasibility == 0.0);
  CHECK(c.verdict == Verdict::refuted);
}

TEST_CASE("a wrong subgradient of the right shape is refuted or inconclusive, never certified") {
  std::mt19937_64 rng(43);
  auto d = make_domain(16, 16, 1.0 / 16);
  const ScalarField u = random_scalar(d, rng);
  const VectorField g = project_unit_ball(random_vector(d, rng)).truncated_to_compatible();
  const ScalarField div = discrete_divergence(g);
  ScalarField u_star(d);
  for (std::size_t k = 0; k < u.size(); ++k) u_star[k] = -div[k];
  const Certificate c = certify(u, u_star, g, spec_for(*d));
  CHECK(c.structure_ok);
  CHECK_FALSE(c.integral_ok);
  CHECK(c.verdict != Verdict::certified);
  CHECK_FALSE(subgradient_oracle(u, u_star, 200, 1).passes(1e-8));
}

TEST_CASE("regions: smooth ramp, step, constant") {
  auto d = make_domain(16, 16, 1.0 / 16);
  ScalarField ramp(d), step(d), flat(d);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      ramp(i, j) = 0.01 * d->x_center(j);
      step(i, j) = j < 8 ? 0.0 : 1.0;
      flat(i, j) = 1.0;
    }
  const auto rr = classify_regions(ramp, gradient_measure(ramp, 0.0), 0.5);
  CHECK(rr.smooth.count == 16 * 15);
  CHECK(rr.jump.count == 0);
  CHECK(rr.zero.count == 16);
  const auto rs = classify_regions(step, gradient_measure(step, 0.0), 0.5);
  CHECK(rs.jump.count == 16);
  CHECK(rs.smooth.count == 0);
  const std::size_t k = d->index(3, 7);
  CHECK(rs.label[k] == Region::jump);
  CHECK(rs.jump_gap[k] == doctest::Approx(1.0));
  CHECK(rs.jump_normal_x[k] == doctest::Approx(1.0));
  const auto rf = classify_regions(flat, gradient_measure(flat, 0.0), 0.5);
  CHECK(rf.zero.count == 256);
  CHECK_THROWS_AS(classify_regions(flat, gradient_measure(flat, 0.0), 0.0), std::invalid_argument);
  CHECK(default_jump_thresh(flat) == 1.0);
}

TEST_CASE("oracle is deterministic in the seed") {
  std::mt19937_64 rng(44);
  auto d = make_domain(12, 12, 1.0 / 12);
  const ScalarField u = random_scalar(d, rng);
  const ScalarField us = random_scalar(d, rng);
  const OracleResult a = subgradient_oracle(u, us, 100, 9);
  const OracleResult b = subgradient_oracle(u, us, 100, 9);
  CHECK(a.worst == b.worst);
  CHECK(a.worst_family == b.worst_family);
  CHECK(subgradient_oracle(u, us, 1, 9).worst == 0.0);
  CHECK_THROWS_AS(subgradient_oracle(u, us, 0, 9), std::invalid_argument);
}

TEST_CASE("block DCT: orthonormal basis and exact inverse") {
  const BlockDct8 t(16, 8);
  CHECK_THROWS_AS(BlockDct8(12, 8), std::invalid_argument);
  std::mt19937_64 rng(45);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(128), c(128), y(128);
  for (double& v : x) v = n(rng);
  t.forward(x, c);
  t.inverse(c, y);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(y[k] == doctest::Approx(x[k]).epsilon(1e-12));
  double ex = 0.0, ec = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    ex += x[k] * x[k];
    ec += c[k] * c[k];
  }
  CHECK(ec == doctest::Approx(ex).epsilon(1e-12));
  // Coefficient (1, 2) of the first block against the textbook formula.
  double ref = 0.0;
  for (int m = 0; m < 8; ++m)
    for (int p = 0; p < 8; ++p)
      ref += 0.5 * std::cos(std::numbers::pi * (2 * m + 1) * 1 / 16.0) * 0.5 *
             std::cos(std::numbers::pi * (2 * p + 1) * 2 / 16.0) * x[m * 8 + p];
  CHECK(c[1 * 8 + 2] == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("interval certificate: constant image with a fixed DC coefficient") {
  auto d = make_domain(8, 8, 1.0 / 8);
  ScalarField u(d);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = 0.25;
  const BlockDct8 t(8, 8);
  std::vector<double> c(64);
  t.forward(u.values(), c);
  std::vector<Interval> box(64, Interval{-1.0, 1.0});
  box[0] = Interval{c[0], c[0]};
  const IntervalCertificate ic = certify_interval_constrained(u, t, box, VectorField(d), spec_for(*d));
  CHECK(ic.verdict == Verdict::certified);
  CHECK(ic.signs[0].state == BoundState::fixed);
  CHECK(ic.signs[5].state == BoundState::interior);
  box[3] = Interval{0.5, 1.0};
  CHECK_THROWS_AS(certify_interval_constrained(u, t, box, VectorField(d), spec_for(*d)), std::invalid_argument);
}
