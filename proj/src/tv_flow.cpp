#include "tvcert/tv_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tvcert/summation.hpp"

namespace tvcert {

namespace {

double masked_mean(const ScalarField& u, std::span<const std::uint8_t> select) {
  std::vector<double> vals;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (select[k]) vals.push_back(u[k]);
  return vals.empty() ? 0.0 : pairwise_sum(vals) / static_cast<double>(vals.size());
}

double distance(const ScalarField& a, const ScalarField& b) {
  ScalarField d(a.domain_ptr());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return l2_norm(d);
}

}  // namespace

FlowStep flow_step(const ScalarField& u, double tau, const RofOptions& rof,
                   const VectorField* warm_start) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be > 0");
  RofSolution sol = solve_rof(u, 1.0 / (2.0 * tau), rof, warm_start);
  return {std::move(sol.u), std::move(sol.g), sol.gap, sol.iterations};
}

double FlowTrajectory::max_section_increase() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < minimal_section.size(); ++k)
    worst = std::max(worst, minimal_section[k] - minimal_section[k - 1]);
  return minimal_section.size() < 2 ? 0.0 : worst;
}

FlowTrajectory run_flow(const ScalarField& u0, const std::vector<double>& schedule,
                        const FlowOptions& options) {
  if (schedule.empty()) throw std::invalid_argument("flow schedule is empty");
  for (double tau : schedule)
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("flow steps must be > 0");
  const bool track = !options.core.empty();
  if (track && options.core.size() != u0.size())
    throw std::invalid_argument("core selection does not match the grid");

  const auto mask = u0.domain().mask();
  const double mean0 = masked_mean(u0, mask);
  auto amplitude = [&](const ScalarField& u) {
    return track ? masked_mean(u, options.core) - mean0 : 0.0;
  };

  FlowTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  traj.tv.push_back(discrete_tv(u0));
  traj.amplitude.push_back(amplitude(u0));

  VectorField g(u0.domain_ptr());
  double first = -1.0;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const double tau = schedule[k];
    FlowStep step = flow_step(traj.states.back(), tau, options.rof, &g);
    const double moved = distance(traj.states.back(), step.u);
    const double section = moved / tau;
    traj.minimal_section.push_back(section);
    traj.steps.push_back(tau);
    traj.gaps.push_back(step.gap);
    traj.times.push_back(traj.times.back() + tau);
    traj.tv.push_back(discrete_tv(step.u));
    traj.amplitude.push_back(amplitude(step.u));
    g = step.g;
    traj.duals.push_back(std::move(step.g));
    traj.states.push_back(std::move(step.u));

    if (first < 0.0) first = section;
    // Extinct: either this step produced a state that is flat to solver
    // accuracy, or this step did not move at all.
    const bool flat = traj.tv.back() <= options.rof.tol_gap * traj.tv.front();
    const bool still = section <= options.extinction_rel * first;
    if (flat || still) {
      if (still && k == 0) {
        traj.extinction_time = 0.0;
        break;
      }
      // The last moving step ran at the speed of the step before it only
      // until the state went flat.
      const std::size_t last = still ? k - 1 : k;
      double used = schedule[last];
      if (last >= 1 && traj.minimal_section[last - 1] > 0.0)
        used = std::min(used, traj.minimal_section[last] * schedule[last] /
                                  traj.minimal_section[last - 1]);
      traj.extinction_time = traj.times[last] + used;
      break;
    }
  }
  return traj;
}

double amplitude_slope(const FlowTrajectory& traj, double floor) {
  const double a0 = traj.amplitude.empty() ? 0.0 : traj.amplitude.front();
  std::vector<double> t;
  std::vector<double> a;
  for (std::size_t k = 0; k < traj.amplitude.size(); ++k) {
    if (traj.amplitude[k] < floor * a0) break;
    t.push_back(traj.times[k]);
    a.push_back(traj.amplitude[k]);
  }
  if (t.size() < 2) throw std::invalid_argument("not enough flow steps above the amplitude floor");
  const double n = static_cast<double>(t.size());
  const double tm = pairwise_sum(t) / n;
  const double am = pairwise_sum(a) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    sxy += (t[k] - tm) * (a[k] - am);
    sxx += (t[k] - tm) * (t[k] - tm);
  }
  return -sxy / sxx;
}

ApproxReport piecewise_constant_approx(const FlowTrajectory& traj,
                                       const std::vector<std::vector<double>>& partitions) {
  const auto& times = traj.times;
  auto node_of = [&](double s) -> std::size_t {
    const double tol = 1e-12 * std::max(1.0, std::abs(times.back()));
    for (std::size_t k = 0; k < times.size(); ++k)
      if (std::abs(times[k] - s) <= tol) return k;
    throw std::invalid_argument("partition point is not a trajectory time");
  };

  ApproxReport report;
  std::vector<std::size_t> previous;
  for (const auto& part : partitions) {
    if (part.size() < 2) throw std::invalid_argument("a partition needs at least two points");
    std::vector<std::size_t> nodes;
    for (double s : part) nodes.push_back(node_of(s));
    if (nodes.front() != 0 || nodes.back() != times.size() - 1)
      throw std::invalid_argument("partition must span the whole trajectory");
    if (!std::is_sorted(nodes.begin(), nodes.end()) ||
        std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
      throw std::invalid_argument("partition points must increase");
    if (!previous.empty() && !std::includes(nodes.begin(), nodes.end(), previous.begin(), previous.end()))
      throw std::invalid_argument("partitions are not nested");
    previous = nodes;

    ApproxLevel level;
    level.intervals = nodes.size() - 1;
    std::vector<double> pieces;
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
      const std::size_t a = nodes[j];
      const std::size_t b = nodes[j + 1];
      for (std::size_t k = a + 1; k <= b; ++k)
        level.sup_error = std::max(level.sup_error, distance(traj.states[a], traj.states[k]));
      // u_eps = u(s_j) on [s_j, s_{j+1}); its dual is the step field certifying
      // u(s_j), or the first step field at t = 0.
      const ScalarField& u = traj.states[a];
      const VectorField& g = traj.duals[a == 0 ? 0 : a - 1];
      const double length = times[b] - times[a];
      pieces.push_back(length * (discrete_tv(u) + inner(u, discrete_divergence(g))));
    }
    level.identity_residual = std::abs(pairwise_sum(pieces));
    report.levels.push_back(level);
  }
  return report;
}

}  // namespace tvcert
