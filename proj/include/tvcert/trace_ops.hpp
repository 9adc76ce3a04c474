#pragma once
// Normal and full traces of a dual field against the gradient measure of u.
//
// Both are limits of the boundary-aware mollifications g_eps along a dyadic
// schedule eps_0, eps_0/2, ..., h. The limit is accepted when the
// L1(|Du|)-distance between the last two candidates drops below tol times the
// total mass; otherwise the result is returned with converged = false.

#include <vector>

#include "tvcert/dual_fields.hpp"
#include "tvcert/grid.hpp"

namespace tvcert {

enum class TraceKind { normal, full };

struct CauchyStep {
  double epsilon = 0.0;
  double distance = 0.0;  // L1(|Du|) distance to the candidate at the previous eps
};

struct TraceResult {
  TraceKind kind = TraceKind::full;
  GradientMeasure measure;
  /// Normal trace: theta in x, y empty. Full trace: both components.
  /// Zero off supp(weight).
  std::vector<double> x;
  std::vector<double> y;
  std::vector<CauchyStep> convergence_log;
  bool converged = false;
  double tol = 1e-4;

  /// Last Cauchy distance divided by the total mass (0 for an empty log).
  double relative_gap() const;
};

inline constexpr double kDefaultTraceTol = 1e-4;

/// `spec.epsilon` is the first radius of the schedule.
TraceResult normal_trace(const VectorField& g, const GradientMeasure& mu,
                         const MollifierSpec& spec, double tol = kDefaultTraceTol);
TraceResult full_trace(const VectorField& g, const GradientMeasure& mu, const MollifierSpec& spec,
                       double tol = kDefaultTraceTol);

/// Same as full_trace but with a schedule supplied by the caller.
TraceResult full_trace(const VectorField& g, const GradientMeasure& mu, const MollifierSpec& spec,
                       const std::vector<double>& schedule, double tol);

/// |<u, div g> + sum (Tg . sigma_u) weight - B| with B the outward boundary
/// flux sum over mask edges h (g . nu) u. Throws std::invalid_argument for a
/// normal or non-converged trace.
double gauss_green_residual(const ScalarField& u, const VectorField& g, const TraceResult& trace);

}  // namespace tvcert
