#include "tvcert/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include "tvcert/calibrate.hpp"
#include "tvcert/io.hpp"
#include "tvcert/report.hpp"
#include "tvcert/tv_flow.hpp"

namespace tvcert {

namespace {

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::certified: return kExitCertified;
    case Verdict::refuted: return kExitRefuted;
    case Verdict::inconclusive: return kExitInconclusive;
  }
  return kExitError;
}

double spacing(const RunConfig& c, int height, int width) {
  return c.h > 0.0 ? c.h : 1.0 / std::max(height, width);
}

struct Loaded {
  Raster raster;
  DomainPtr domain;
};

Loaded load(const RunConfig& c, int min_channels) {
  if (c.input.empty()) throw std::invalid_argument("--input is required for '" + c.command + "'");
  Loaded l;
  l.raster = read_raster(c.input);
  if (l.raster.channels < min_channels)
    throw std::invalid_argument(c.input + ": expected at least " + std::to_string(min_channels) +
                                " channels, found " + std::to_string(l.raster.channels));
  l.domain = domain_of(l.raster, spacing(c, l.raster.height, l.raster.width));
  if (l.domain->mask_count() == 0) throw std::invalid_argument(c.input + ": every pixel is masked out");
  return l;
}

Shape parse_shape(const RunConfig& c) {
  if (c.shape.empty() || c.shape == "disc") return Shape::disc({0.5, 0.5}, c.radius);
  if (c.shape.front() == '{') return shape_from_json(Json::parse(c.shape));
  if (std::filesystem::exists(c.shape)) return shape_from_json(Json::parse(read_bytes(c.shape)));
  throw std::invalid_argument("--shape: expected 'disc', inline JSON or a JSON file, got '" + c.shape + "'");
}

/// Input raster, or the rasterized shape when no input is given.
ScalarField scalar_input(const RunConfig& c) {
  if (!c.input.empty()) {
    const Loaded l = load(c, 1);
    return channel(l.raster, 0, l.domain);
  }
  const DomainPtr d = make_domain(c.height, c.width, spacing(c, c.height, c.width));
  const Shape s = parse_shape(c);
  require_inside(s, *d);
  return rasterize(s, d);
}

MollifierSpec trace_spec(const RunConfig& c, const GridDomain& d) {
  const double eps = c.eps0 > 0.0 ? c.eps0 : 8.0 * d.spacing();
  return make_mollifier_spec(d, eps, eps);
}

Tolerances tolerances(const RunConfig& c) {
  Tolerances t;
  t.tol_trace = c.tol_trace;
  return t;
}

void write_artifact(const RunConfig& c, std::string_view suffix, std::string_view bytes) {
  if (!c.output.empty()) write_bytes(c.output + std::string(suffix), bytes);
}

void emit(const RunConfig& c, std::ostream& out, const Json& j, const std::string& text) {
  switch (c.report) {
    case ReportFormat::json: out << dump(j); break;
    case ReportFormat::text: out << text; break;
    case ReportFormat::csv:
      out << "key,value\n";
      for (const auto& [k, v] : j.items())
        if (!v.is_structured()) out << k << "," << v.dump() << "\n";
      break;
  }
}

int cmd_denoise(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ScalarField u0 = scalar_input(c);
  RofSolution sol{ScalarField(u0.domain_ptr()), VectorField(u0.domain_ptr())};
  try {
    sol = solve_rof(u0, c.lambda, RofOptions{c.tol_gap, 1000000, 10});
  } catch (const IterationLimit& e) {
    err << "warning: " << e.what() << "; certifying the last iterate\n";
    sol = e.last();
  }
  const Certificate cert = certify_rof(u0, c.lambda, sol, trace_spec(c, u0.domain()), tolerances(c));
  Json j = to_json(cert);
  j["solver"] = Json{{"lambda", c.lambda}, {"gap", sol.gap}, {"primal", sol.primal}, {"scale", sol.scale}, {"iterations", sol.iterations}};
  write_artifact(c, ".u.fld", serialize_fld(pack(sol.u)));
  write_artifact(c, ".g.fld", serialize_fld(pack(sol.g)));
  write_artifact(c, ".json", dump(j));
  emit(c, out, j, render_report(cert));
  return exit_code(cert.verdict);
}

int cmd_certify(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c, 4);
  const ScalarField u = channel(l.raster, 0, l.domain);
  const ScalarField u_star = channel(l.raster, 1, l.domain);
  const VectorField g = channel_pair(l.raster, 2, 3, l.domain);
  const Certificate cert = certify(u, u_star, g, trace_spec(c, *l.domain), tolerances(c));
  const Json j = to_json(cert);
  write_artifact(c, ".json", dump(j));
  emit(c, out, j, render_report(cert));
  return exit_code(cert.verdict);
}

int cmd_flow(const RunConfig& c, std::ostream& out) {
  const ScalarField u0 = scalar_input(c);
  if (!c.tau) throw std::invalid_argument("--tau is required for 'flow'");
  FlowOptions opt;
  opt.rof = RofOptions{c.tol_gap, 1000000, 10};
  opt.core.assign(u0.domain().mask().begin(), u0.domain().mask().end());
  const FlowTrajectory traj = run_flow(u0, std::vector<double>(static_cast<std::size_t>(c.steps), *c.tau), opt);
  const Json j = to_json(traj);
  const std::string csv = flow_csv(traj);
  write_artifact(c, ".csv", csv);
  write_artifact(c, ".json", dump(j));
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, ".step%04zu.fld", k);
    write_artifact(c, suffix, serialize_fld(pack(traj.states[k])));
  }
  if (c.report == ReportFormat::csv)
    out << csv;
  else
    emit(c, out, j, render_report(traj));
  const double ref = traj.minimal_section.empty() ? 0.0 : traj.minimal_section.front();
  return traj.max_section_increase() <= 1e-6 * ref ? kExitCertified : kExitRefuted;
}

int cmd_calibrate(const RunConfig& c, std::ostream& out) {
  const Shape s = parse_shape(c);
  const DomainPtr d = make_domain(c.height, c.width, spacing(c, c.height, c.width));
  CalibrationTolerances t;
  t.tol_gap = std::max(c.tol_gap, 1e-6);
  const CalibrabilityReport r = calibrability_verdict(s, d, t);
  const Json j = to_json(r);
  write_artifact(c, ".json", dump(j));
  emit(c, out, j, render_report(r));
  if (r.numerical_certified) return kExitCertified;
  const bool only_trace = r.feasibility <= t.tol_f && r.zero_ext_ok && r.identity_residual <= t.tol_identity;
  return only_trace && !r.trace_converged ? kExitInconclusive : kExitRefuted;
}

int cmd_mollify(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c, 2);
  const VectorField g = channel_pair(l.raster, 0, 1, l.domain);
  const double eps = c.eps0 > 0.0 ? c.eps0 : 4.0 * l.domain->spacing();
  const MollifierSpec spec = make_mollifier_spec(*l.domain, eps, eps);
  const VectorField ge = mollify_boundary_aware(g, spec);
  const WqDivNorm dist = wq_div_distance(ge, g, 2.0);
  Json j{{"spec", to_json(spec)},
         {"sup_norm_in", g.sup_norm()},
         {"sup_norm_out", ge.sup_norm()},
         {"wq_div_distance", dist.value()}};
  write_artifact(c, ".fld", serialize_fld(pack(ge)));
  write_artifact(c, ".json", dump(j));
  const bool ok = ge.sup_norm() <= g.sup_norm() + 1e-12;
  emit(c, out, j,
       "sup-norm bound: " + std::string(ok ? "PASS" : "FAIL") + " (" + std::to_string(ge.sup_norm()) +
           " vs " + std::to_string(g.sup_norm()) + ")\n");
  return ok ? kExitCertified : kExitRefuted;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c, 2);
  const ScalarField u = channel(l.raster, 0, l.domain);
  const ScalarField u_star = channel(l.raster, 1, l.domain);
  const OracleResult r = subgradient_oracle(u, u_star, c.samples, c.seed);
  const double tol_s = Tolerances{}.tol_s;
  Json j = to_json(r);
  j["seed"] = c.seed;
  j["passes"] = r.passes(tol_s);
  write_artifact(c, ".json", dump(j));
  emit(c, out, j, render_report(r, tol_s));
  return r.passes(tol_s) ? kExitCertified : kExitRefuted;
}

}  // namespace

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(lambda, "--lambda");
  positive(tol_gap, "--tol-gap");
  positive(tol_trace, "--tol-trace");
  positive(radius, "--radius");
  if (tau) positive(*tau, "--tau");
  if (h != 0.0) positive(h, "--h");
  if (eps0 != 0.0) positive(eps0, "--eps0");
  if (steps < 1) throw std::invalid_argument("--steps must be at least 1");
  if (height < 1 || width < 1) throw std::invalid_argument("--grid must be positive");
  if (samples < 1) throw std::invalid_argument("--samples must be at least 1");
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    c.validate();
    if (c.command == "denoise") return cmd_denoise(c, out, err);
    if (c.command == "certify") return cmd_certify(c, out);
    if (c.command == "flow") return cmd_flow(c, out);
    if (c.command == "calibrate") return cmd_calibrate(c, out);
    if (c.command == "mollify") return cmd_mollify(c, out);
    if (c.command == "oracle") return cmd_oracle(c, out);
    throw std::invalid_argument("unknown command '" + c.command + "'");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace tvcert
