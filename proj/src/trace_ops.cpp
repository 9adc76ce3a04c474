#include "tvcert/trace_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "tvcert/summation.hpp"

namespace tvcert {

namespace {

void check_domains(const VectorField& g, const GradientMeasure& mu) {
  if (!mu.domain || !same_domain(g.domain_ptr(), mu.domain))
    throw std::invalid_argument("field and gradient measure live on different domains");
}

TraceResult trace_impl(TraceKind kind, const VectorField& g, const GradientMeasure& mu,
                       const MollifierSpec& spec, const std::vector<double>& schedule,
                       double tol) {
  check_domains(g, mu);
  if (schedule.empty()) throw std::invalid_argument("empty mollification schedule");
  if (!(tol > 0.0)) throw std::invalid_argument("trace tolerance must be positive");
  const std::size_t n = g.size();
  TraceResult out;
  out.kind = kind;
  out.measure = mu;
  out.tol = tol;

  std::vector<double> prev_x;
  std::vector<double> prev_y;
  std::vector<double> dist(n, 0.0);
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const VectorField ge = mollify_boundary_aware(g, spec.with_epsilon(schedule[s]));
    std::vector<double> cx(n, 0.0);
    std::vector<double> cy(kind == TraceKind::full ? n : 0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (!mu.supported(k)) continue;
      if (kind == TraceKind::full) {
        cx[k] = ge.x()[k];
        cy[k] = ge.y()[k];
      } else {
        cx[k] = ge.x()[k] * mu.direction_x[k] + ge.y()[k] * mu.direction_y[k];
      }
    }
    if (s > 0) {
      for (std::size_t k = 0; k < n; ++k) {
        const double dx = cx[k] - prev_x[k];
        const double dy = kind == TraceKind::full ? cy[k] - prev_y[k] : 0.0;
        dist[k] = mu.weight[k] * std::sqrt(dx * dx + dy * dy);
      }
      out.convergence_log.push_back({schedule[s], pairwise_sum(dist)});
    }
    prev_x = std::move(cx);
    prev_y = std::move(cy);
  }
  out.x = std::move(prev_x);
  out.y = std::move(prev_y);
  const double mass = mu.total_mass();
  out.converged = out.convergence_log.empty() ||
                  out.convergence_log.back().distance <= tol * mass;
  return out;
}

}  // namespace

double TraceResult::relative_gap() const {
  if (convergence_log.empty()) return 0.0;
  const double mass = measure.total_mass();
  if (mass <= 0.0) return 0.0;
  return convergence_log.back().distance / mass;
}

TraceResult normal_trace(const VectorField& g, const GradientMeasure& mu,
                         const MollifierSpec& spec, double tol) {
  return trace_impl(TraceKind::normal, g, mu, spec,
                    dyadic_schedule(spec.epsilon, g.domain().spacing()), tol);
}

TraceResult full_trace(const VectorField& g, const GradientMeasure& mu, const MollifierSpec& spec,
                       double tol) {
  return trace_impl(TraceKind::full, g, mu, spec,
                    dyadic_schedule(spec.epsilon, g.domain().spacing()), tol);
}

TraceResult full_trace(const VectorField& g, const GradientMeasure& mu, const MollifierSpec& spec,
                       const std::vector<double>& schedule, double tol) {
  return trace_impl(TraceKind::full, g, mu, spec, schedule, tol);
}

double gauss_green_residual(const ScalarField& u, const VectorField& g, const TraceResult& trace) {
  if (trace.kind != TraceKind::full)
    throw std::invalid_argument("Gauss-Green residual needs a full trace");
  if (!trace.converged)
    throw std::invalid_argument("Gauss-Green residual needs a converged trace");
  if (!same_domain(u.domain_ptr(), g.domain_ptr()) || !same_domain(u.domain_ptr(), trace.measure.domain))
    throw std::invalid_argument("fields live on different domains");

  const GridDomain& d = u.domain();
  const double h = d.spacing();
  const double volume = inner(u, flux_divergence(g));

  const GradientMeasure& mu = trace.measure;
  std::vector<double> pairing(u.size(), 0.0);
  for (std::size_t k = 0; k < u.size(); ++k)
    if (mu.supported(k))
      pairing[k] = (trace.x[k] * mu.direction_x[k] + trace.y[k] * mu.direction_y[k]) * mu.weight[k];
  const double interior = pairwise_sum(pairing);

  std::vector<double> flux;
  flux.reserve(d.boundary_edges().size());
  for (const BoundaryEdge& e : d.boundary_edges()) {
    const std::size_t k = d.index(e.row, e.col);
    if (e.outward == Direction::east) flux.push_back(h * g.x()[k] * u[k]);
    if (e.outward == Direction::south) flux.push_back(h * g.y()[k] * u[k]);
  }
  const double boundary = pairwise_sum(flux);
  return std::abs(volume + interior - boundary);
}

}  // namespace tvcert
