#include <doctest.h>

#include "support.hpp"
#include "tvcert/tv_flow.hpp"

using namespace tvtest;

TEST_CASE("one flow step is the ROF problem with lambda = 1 / (2 tau)") {
  auto d = make_domain(12, 12, 1.0 / 12);
  std::mt19937_64 rng(3);
  const ScalarField u0 = random_scalar(d, rng);
  const double tau = 0.01;
  const RofOptions opt{1e-10, 200000, 10};
  const FlowStep step = flow_step(u0, tau, opt);
  const RofSolution sol = solve_rof(u0, 1.0 / (2.0 * tau), opt);
  for (std::size_t k = 0; k < u0.size(); ++k) CHECK(step.u[k] == doctest::Approx(sol.u[k]).epsilon(1e-9));
}

TEST_CASE("step plateaus move at the rate 1 / (h n) per unit time") {
  // Row-constant step a | b: the jump has length H h and the plateau widths are
  // n1 h, n2 h, so the plateau values move by tau / (h n_side) per step.
  const int rows = 6, cols = 10, split = 4;
  const double h = 0.1, tau = 0.002;
  auto d = make_domain(rows, cols, h);
  ScalarField u0(d);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) u0(i, j) = j < split ? 1.0 : 0.0;
  FlowOptions opt;
  opt.rof = {1e-12, 400000, 10};
  const FlowTrajectory traj = run_flow(u0, {tau, tau, tau}, opt);
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const double t = traj.times[k];
    CHECK(traj.states[k](2, 0) == doctest::Approx(1.0 - t / (h * split)).epsilon(1e-7));
    CHECK(traj.states[k](2, cols - 1) == doctest::Approx(t / (h * (cols - split))).epsilon(1e-7));
  }
  // constant speed: every step moves by the same amount
  CHECK(traj.minimal_section[0] == doctest::Approx(traj.minimal_section[2]).epsilon(1e-6));
}

TEST_CASE("constant data is stationary") {
  auto d = make_domain(8, 8, 0.125);
  ScalarField u0(d);
  for (std::size_t k = 0; k < u0.size(); ++k) u0[k] = 0.7;
  const FlowTrajectory traj = run_flow(u0, std::vector<double>(4, 0.1));
  for (double tv : traj.tv) CHECK(tv == 0.0);
  for (double s : traj.minimal_section) CHECK(s == 0.0);
  for (const auto& u : traj.states) CHECK(u[17] == 0.7);
}

TEST_CASE("minimal sections are non-increasing and TV decreases") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto d = make_domain(16, 16, 1.0 / 16);
    std::mt19937_64 rng(seed);
    const ScalarField u0 = random_scalar(d, rng);
    const FlowTrajectory traj = run_flow(u0, std::vector<double>(6, 2e-3));
    CHECK(traj.max_section_increase() <= 1e-6 * traj.minimal_section.front());
    for (std::size_t k = 1; k < traj.tv.size(); ++k) CHECK(traj.tv[k] <= traj.tv[k - 1] + 1e-12);
  }
}

TEST_CASE("disc amplitude decays at the discrete calibration rate") {
  const int n = 64;
  auto d = make_domain(n, n, 1.0 / n);
  const ScalarField u0 = smoothed_disc(d, 0.5, 0.5, 0.3);
  double mass = 0.0;
  for (std::size_t k = 0; k < u0.size(); ++k) mass += u0[k];
  const double lambda_h = discrete_tv(u0) / (mass * d->spacing() * d->spacing());
  FlowOptions opt;
  opt.rof = {1e-6, 400000, 10};
  opt.core.assign(u0.size(), 0);
  for (std::size_t k = 0; k < u0.size(); ++k) opt.core[k] = u0[k] == 1.0;
  const FlowTrajectory traj = run_flow(u0, std::vector<double>(6, 0.1 / lambda_h), opt);
  // The plateau has radius R - 1.5 h, so at 64^2 the rate sits about 5% above lambda_h.
  CHECK(rel(amplitude_slope(traj), lambda_h) < 0.1);
}

TEST_CASE("piecewise-constant approximation improves under refinement") {
  auto d = make_domain(12, 12, 1.0 / 12);
  std::mt19937_64 rng(9);
  const ScalarField u0 = random_scalar(d, rng);
  const FlowTrajectory traj = run_flow(u0, std::vector<double>(8, 1e-3));
  const auto& t = traj.times;
  const ApproxReport rep = piecewise_constant_approx(
      traj, {{t[0], t[8]}, {t[0], t[4], t[8]}, {t[0], t[2], t[4], t[6], t[8]}, t});
  REQUIRE(rep.levels.size() == 4);
  for (std::size_t l = 1; l < rep.levels.size(); ++l)
    CHECK(rep.levels[l].sup_error <= rep.levels[l - 1].sup_error);
  CHECK(rep.levels.back().intervals == 8);

  CHECK_THROWS_AS(piecewise_constant_approx(traj, {{t[0], 0.5 * (t[1] + t[2]), t[8]}}), std::invalid_argument);
  CHECK_THROWS_AS(piecewise_constant_approx(traj, {{t[0], t[4], t[8]}, {t[0], t[3], t[8]}}),
                  std::invalid_argument);
}

TEST_CASE("flow input validation") {
  auto d = make_domain(4, 4, 0.25);
  ScalarField u0(d);
  CHECK_THROWS_AS(run_flow(u0, {}), std::invalid_argument);
  CHECK_THROWS_AS(run_flow(u0, {0.1, 0.0}), std::invalid_argument);
  FlowOptions bad;
  bad.core.assign(3, 1);
  CHECK_THROWS_AS(run_flow(u0, {0.1}, bad), std::invalid_argument);
}
