#pragma once
// TV flow by minimizing movements: u_{k+1} = argmin TV(v) + ||v - u_k||^2 / (2 tau_k),
// i.e. solve_rof with lambda = 1 / (2 tau_k).

#include <optional>
#include <vector>

#include "tvcert/grid.hpp"
#include "tvcert/subdiff_certify.hpp"

namespace tvcert {

struct FlowStep {
  ScalarField u;
  VectorField g;
  double gap = 0.0;
  int iterations = 0;
};

/// Throws IterationLimit from the solver.
FlowStep flow_step(const ScalarField& u, double tau, const RofOptions& rof,
                   const VectorField* warm_start = nullptr);

struct FlowOptions {
  RofOptions rof{1e-8, 200000, 10};
  /// Stop when the minimal-section estimate drops below this fraction of the first one.
  double extinction_rel = 1e-8;
  /// Pixels whose amplitude is tracked (empty: amplitude not recorded).
  std::vector<std::uint8_t> core;
};

struct FlowTrajectory {
  std::vector<double> times;             // t_0 = 0, t_k
  std::vector<ScalarField> states;       // u_k
  std::vector<VectorField> duals;        // g_k for k >= 1 (size = states - 1)
  std::vector<double> steps;             // tau_k
  std::vector<double> minimal_section;   // ||(u_k - u_{k+1}) / tau_k||, one per step
  std::vector<double> tv;                // TV_h(u_k)
  std::vector<double> amplitude;         // mean of u_k over the core minus the mean of u_0
  std::vector<double> gaps;
  std::optional<double> extinction_time;

  /// Largest increase minimal_section[k+1] - minimal_section[k] (<= 0 when monotone).
  double max_section_increase() const;
};

/// Throws std::invalid_argument for an empty schedule or tau <= 0.
FlowTrajectory run_flow(const ScalarField& u0, const std::vector<double>& schedule,
                        const FlowOptions& options = {});

/// Decay rate (negated least-squares slope of amplitude against time) over the leading steps whose
/// amplitude stays above `floor` times the initial amplitude.
double amplitude_slope(const FlowTrajectory& traj, double floor = 0.5);

struct ApproxLevel {
  std::size_t intervals = 0;
  double sup_error = 0.0;           // sup_t ||u_eps(t) - u(t)||
  double identity_residual = 0.0;   // |int TV(u_eps) dt + int <u_eps, div g_eps> dt|
};

struct ApproxReport {
  std::vector<ApproxLevel> levels;
};

/// Each partition is a list of breakpoints that must be a subset of the
/// trajectory times, start at t_0 and end at the final time; each level must
/// refine the previous one. The reference u(t) is the trajectory itself
/// (piecewise linear in time).
ApproxReport piecewise_constant_approx(const FlowTrajectory& traj,
                                       const std::vector<std::vector<double>>& partitions);

}  // namespace tvcert
