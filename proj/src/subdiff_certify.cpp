#include "tvcert/subdiff_certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "tvcert/summation.hpp"

namespace tvcert {

namespace {

void require_same(const DomainPtr& a, const DomainPtr& b) {
  if (!same_domain(a, b)) throw std::invalid_argument("inputs live on different domains");
}

/// |<u, div g> + TV(u)| / max(TV(u), eps); eps sits at the rounding level of
/// the inner product so that constant u with any feasible g is not penalized
/// for cancellation noise.
double integral_residual(double tv, const ScalarField& u, const ScalarField& div) {
  const double pairing = inner(u, div);
  const double eps = std::max(1e-12 * l2_norm(u) * l2_norm(div), std::numeric_limits<double>::min());
  return std::abs(tv + pairing) / std::max(tv, eps);
}

double trace_residual(const TraceResult& tr) {
  const GradientMeasure& mu = tr.measure;
  std::vector<double> err(mu.weight.size(), 0.0);
  for (std::size_t k = 0; k < err.size(); ++k)
    if (mu.supported(k))
      err[k] = mu.weight[k] * std::hypot(tr.x[k] - mu.direction_x[k], tr.y[k] - mu.direction_y[k]);
  const double mass = mu.total_mass();
  return mass > 0.0 ? pairwise_sum(err) / mass : 0.0;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view to_string(SampleFamily f) {
  switch (f) {
    case SampleFamily::identity: return "identity";
    case SampleFamily::gaussian: return "gaussian";
    case SampleFamily::scaled: return "scaled";
    case SampleFamily::piecewise_constant: return "piecewise_constant";
  }
  return "?";
}

std::string_view to_string(BoundState s) {
  switch (s) {
    case BoundState::fixed: return "fixed";
    case BoundState::upper: return "upper";
    case BoundState::lower: return "lower";
    case BoundState::interior: return "interior";
  }
  return "?";
}

// --- regions -------------------------------------------------------------------

double default_jump_thresh(const ScalarField& u) {
  const auto mag = gradient_magnitude(u);
  const auto mask = u.domain().mask();
  std::vector<double> inside;
  for (std::size_t k = 0; k < mag.size(); ++k)
    if (mask[k]) inside.push_back(mag[k]);
  const double mean = pairwise_sum(inside) / static_cast<double>(inside.size());
  const double t = 10.0 * mean * u.domain().spacing();
  return t > 0.0 ? t : 1.0;
}

RegionReport classify_regions(const ScalarField& u, const GradientMeasure& mu, double jump_thresh) {
  if (!(jump_thresh > 0.0)) throw std::invalid_argument("jump_thresh must be > 0");
  require_same(u.domain_ptr(), mu.domain);
  const GridDomain& d = u.domain();
  const double h = d.spacing();
  const auto mag = gradient_magnitude(u);
  RegionReport rep;
  rep.jump_thresh = jump_thresh;
  rep.eps_zero = mu.eps_zero;
  rep.label.assign(u.size(), Region::zero);
  rep.jump_normal_x.assign(u.size(), 0.0);
  rep.jump_normal_y.assign(u.size(), 0.0);
  rep.jump_gap.assign(u.size(), 0.0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!d.mask()[k]) continue;
    RegionStats* stats = &rep.zero;
    if (mu.supported(k)) {
      if (mag[k] >= jump_thresh / h) {
        rep.label[k] = Region::jump;
        rep.jump_normal_x[k] = mu.direction_x[k];
        rep.jump_normal_y[k] = mu.direction_y[k];
        rep.jump_gap[k] = h * mag[k];
        stats = &rep.jump;
      } else {
        rep.label[k] = Region::smooth;
        stats = &rep.smooth;
      }
    }
    stats->count += 1;
    stats->weight += mu.weight[k];
  }
  return rep;
}

void region_alignment(RegionReport& report, const TraceResult& trace) {
  const GradientMeasure& mu = trace.measure;
  for (RegionStats* s : {&report.smooth, &report.jump, &report.zero}) {
    s->mean_error = 0.0;
    s->max_error = 0.0;
  }
  std::vector<double> acc_smooth;
  std::vector<double> acc_jump;
  for (std::size_t k = 0; k < report.label.size(); ++k) {
    if (!mu.supported(k)) continue;
    const double e = std::hypot(trace.x[k] - mu.direction_x[k], trace.y[k] - mu.direction_y[k]);
    if (report.label[k] == Region::smooth) {
      acc_smooth.push_back(e * mu.weight[k]);
      report.smooth.max_error = std::max(report.smooth.max_error, e);
    } else if (report.label[k] == Region::jump) {
      acc_jump.push_back(e * mu.weight[k]);
      report.jump.max_error = std::max(report.jump.max_error, e);
    }
  }
  if (report.smooth.weight > 0.0) report.smooth.mean_error = pairwise_sum(acc_smooth) / report.smooth.weight;
  if (report.jump.weight > 0.0) report.jump.mean_error = pairwise_sum(acc_jump) / report.jump.weight;
}

// --- certificate -------------------------------------------------------------------

Certificate certify(const ScalarField& u, const ScalarField& u_star, const VectorField& g,
                    const MollifierSpec& spec, const Tolerances& tols) {
  require_same(u.domain_ptr(), u_star.domain_ptr());
  require_same(u.domain_ptr(), g.domain_ptr());
  Certificate c{.u = u, .u_star = u_star, .g = g, .trace = {}, .regions = {}, .tols = tols};
  c.tols = tols;
  c.tv = discrete_tv(u);
  c.feasibility = std::max(0.0, g.sup_norm() - 1.0);
  c.zero_ext_ok = g.zero_extension_compatible(tols.zero_ext);

  // Divergence of the zero extension: faces leaving the mask count as flux.
  const ScalarField div = flux_divergence(g);
  ScalarField mismatch(u.domain_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) mismatch[k] = u_star[k] + div[k];
  const double ref = std::max(l2_norm(u_star), l2_norm(div));
  c.div_match = ref > 0.0 ? l2_norm(mismatch) / ref : 0.0;
  c.integral_residual = integral_residual(c.tv, u, div);

  const double eps_zero = tols.eps_zero >= 0.0 ? tols.eps_zero : default_eps_zero(u);
  const GradientMeasure mu = gradient_measure(u, eps_zero);
  c.trace = full_trace(g, mu, spec, tols.tol_trace);
  c.fulltrace_residual = trace_residual(c.trace);

  const double jt = tols.jump_thresh > 0.0 ? tols.jump_thresh : default_jump_thresh(u);
  c.regions = classify_regions(u, mu, jt);
  region_alignment(c.regions, c.trace);

  c.structure_ok = c.feasibility <= tols.tol_f && c.zero_ext_ok && c.div_match <= tols.tol_d;
  c.integral_ok = c.integral_residual <= tols.tol_i;
  c.trace_ok = c.fulltrace_residual <= tols.tol_t;
  c.criteria_agree = c.integral_ok == c.trace_ok;
  if (!c.structure_ok)
    c.verdict = Verdict::refuted;
  else if (c.integral_ok || c.trace_ok)
    c.verdict = Verdict::certified;
  else
    c.verdict = c.trace.converged ? Verdict::refuted : Verdict::inconclusive;
  return c;
}

Certificate certify_rof(const ScalarField& u0, double lambda, const RofSolution& sol,
                        const MollifierSpec& spec, const Tolerances& tols) {
  require_same(u0.domain_ptr(), sol.u.domain_ptr());
  ScalarField u_star(u0.domain_ptr());
  for (std::size_t k = 0; k < u0.size(); ++k) u_star[k] = 2.0 * lambda * (u0[k] - sol.u[k]);
  return certify(sol.u, u_star, sol.g, spec, tols);
}

// --- oracle ---------------------------------------------------------------------------

OracleResult subgradient_oracle(const ScalarField& u, const ScalarField& u_star,
                                std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("oracle needs at least one sample");
  require_same(u.domain_ptr(), u_star.domain_ptr());
  const GridDomain& d = u.domain();
  const auto mask = d.mask();
  const double tv_u = discrete_tv(u);
  const double pair_u = inner(u_star, u);

  OracleResult res;
  res.scale = tv_u + l2_norm(u_star) * l2_norm(u);
  res.samples = samples;
  // v = u: the bound is attained with equality.
  res.worst = tv_u + (inner(u_star, u) - pair_u) - tv_u;
  res.worst_family = SampleFamily::identity;

  std::vector<double> sq;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (mask[k]) sq.push_back(u[k] * u[k]);
  const double rms = std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> row(0, d.height() - 1);
  std::uniform_int_distribution<int> col(0, d.width() - 1);

  ScalarField v(u.domain_ptr());
  for (std::size_t s = 1; s < samples; ++s) {
    const auto family = static_cast<SampleFamily>(1 + (s - 1) % 3);
    switch (family) {
      case SampleFamily::gaussian: {
        const double amp = (rms + 1.0) * std::pow(10.0, -3.0 + 4.0 * unit(rng));
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = mask[k] ? amp * normal(rng) : 0.0;
        break;
      }
      case SampleFamily::scaled: {
        const double t = -2.0 + 5.0 * unit(rng);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = t * u[k];
        break;
      }
      case SampleFamily::piecewise_constant:
      default: {
        int i0 = row(rng), i1 = row(rng), j0 = col(rng), j1 = col(rng);
        if (i0 > i1) std::swap(i0, i1);
        if (j0 > j1) std::swap(j0, j1);
        const double c = (rms + 1.0) * normal(rng);
        for (int i = 0; i < d.height(); ++i)
          for (int j = 0; j < d.width(); ++j) {
            const std::size_t k = d.index(i, j);
            const bool in = i >= i0 && i <= i1 && j >= j0 && j <= j1;
            v[k] = mask[k] ? u[k] + (in ? c : 0.0) : 0.0;
          }
        break;
      }
    }
    const double value = tv_u + (inner(u_star, v) - pair_u) - discrete_tv(v);
    if (value > res.worst) {
      res.worst = value;
      res.worst_family = family;
    }
  }
  return res;
}

// --- interval constraints ----------------------------------------------------------------

BlockDct8::BlockDct8(int height, int width) : height_(height), width_(width) {
  if (height <= 0 || width <= 0 || height % 8 != 0 || width % 8 != 0)
    throw std::invalid_argument("block DCT needs dimensions that are positive multiples of 8");
  for (int k = 0; k < 8; ++k)
    for (int n = 0; n < 8; ++n)
      basis_[k][n] = (k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0)) *
                     std::cos(std::numbers::pi * (2 * n + 1) * k / 16.0);
}

void BlockDct8::apply(std::span<const double> in, std::span<double> out, bool transpose) const {
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  if (in.size() != n || out.size() != n) throw std::invalid_argument("transform size mismatch");
  auto m = [&](int a, int b) { return transpose ? basis_[b][a] : basis_[a][b]; };
  double blk[8][8];
  double tmp[8][8];
  for (int bi = 0; bi < height_; bi += 8)
    for (int bj = 0; bj < width_; bj += 8) {
      for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) blk[r][c] = in[static_cast<std::size_t>(bi + r) * width_ + bj + c];
      for (int k = 0; k < 8; ++k)
        for (int c = 0; c < 8; ++c) {
          double s = 0.0;
          for (int r = 0; r < 8; ++r) s += m(k, r) * blk[r][c];
          tmp[k][c] = s;
        }
      for (int k = 0; k < 8; ++k)
        for (int l = 0; l < 8; ++l) {
          double s = 0.0;
          for (int c = 0; c < 8; ++c) s += tmp[k][c] * m(l, c);
          out[static_cast<std::size_t>(bi + k) * width_ + bj + l] = s;
        }
    }
}

void BlockDct8::forward(std::span<const double> in, std::span<double> out) const {
  apply(in, out, false);
}

void BlockDct8::inverse(std::span<const double> in, std::span<double> out) const {
  apply(in, out, true);
}

IntervalCertificate certify_interval_constrained(const ScalarField& u,
                                                 const OrthonormalTransform& transform,
                                                 std::span<const Interval> intervals,
                                                 const VectorField& g, const MollifierSpec& spec,
                                                 const Tolerances& tols) {
  require_same(u.domain_ptr(), g.domain_ptr());
  if (intervals.size() != u.size()) throw std::invalid_argument("one interval per coefficient required");
  const double h = u.domain().spacing();

  std::vector<double> coeff(u.size());
  transform.forward(u.values(), coeff);
  double peak = 0.0;
  for (double c : coeff) peak = std::max(peak, std::abs(c));
  const double act_tol = 1e-9 * (1.0 + peak);

  IntervalCertificate c;
  c.tols = tols;
  const ScalarField div = flux_divergence(g);
  std::vector<double> dcoeff(u.size());
  transform.forward(div.values(), dcoeff);
  c.sign_tol = tols.tol_d * h * l2_norm(div);

  c.signs.reserve(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    const Interval& J = intervals[n];
    if (!(J.lo <= J.hi)) throw std::invalid_argument("interval " + std::to_string(n) + " is empty");
    if (coeff[n] < J.lo - act_tol || coeff[n] > J.hi + act_tol)
      throw std::invalid_argument("coefficient " + std::to_string(n) + " leaves its interval");
    SignCheck s;
    s.index = n;
    s.coefficient = h * h * dcoeff[n];  // (div g, a_n) in L2 with h^2 quadrature
    if (J.hi - J.lo <= act_tol) {
      s.state = BoundState::fixed;
    } else if (std::abs(coeff[n] - J.hi) <= act_tol) {
      s.state = BoundState::upper;
      s.ok = s.coefficient >= -c.sign_tol;
    } else if (std::abs(coeff[n] - J.lo) <= act_tol) {
      s.state = BoundState::lower;
      s.ok = s.coefficient <= c.sign_tol;
    } else {
      s.state = BoundState::interior;
      s.ok = std::abs(s.coefficient) <= c.sign_tol;
    }
    if (!s.ok) ++c.sign_failures;
    c.signs.push_back(s);
  }

  c.tv = discrete_tv(u);
  c.feasibility = std::max(0.0, g.sup_norm() - 1.0);
  c.zero_ext_ok = g.zero_extension_compatible(tols.zero_ext);
  c.integral_residual = integral_residual(c.tv, u, div);
  const double eps_zero = tols.eps_zero >= 0.0 ? tols.eps_zero : default_eps_zero(u);
  c.trace = full_trace(g, gradient_measure(u, eps_zero), spec, tols.tol_trace);
  c.fulltrace_residual = trace_residual(c.trace);

  c.structure_ok = c.feasibility <= tols.tol_f && c.zero_ext_ok;
  c.integral_ok = c.integral_residual <= tols.tol_i;
  c.trace_ok = c.fulltrace_residual <= tols.tol_t;
  if (!c.structure_ok || c.sign_failures > 0)
    c.verdict = Verdict::refuted;
  else if (c.integral_ok || c.trace_ok)
    c.verdict = Verdict::certified;
  else
    c.verdict = c.trace.converged ? Verdict::refuted : Verdict::inconclusive;
  return c;
}

}  // namespace tvcert
