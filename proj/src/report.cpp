#include "tvcert/report.hpp"

#include <cstdio>
#include <stdexcept>

namespace tvcert {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}


Json point(Vec2 v) { return Json::array({v.x, v.y}); }

Vec2 point_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a 2-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string line(std::string_view name, bool ok, std::string_view detail) {
  return std::string(name) + ": " + (ok ? "PASS" : "FAIL") + " (" + std::string(detail) + ")\n";
}

std::string bound(double value, double tol) {
  return num(value) + (value <= tol ? " <= " : " > ") + num(tol);
}

/// The trace line is inconclusive when it fails without a converged limit.
std::string trace_line(double residual, double tol, const TraceResult& tr) {
  std::string out = "full trace Tg = sigma_u: ";
  if (residual <= tol) {
    out += "PASS (" + bound(residual, tol) + ")\n";
  } else if (tr.converged) {
    out += "FAIL (" + bound(residual, tol) + ")\n";
  } else {
    out += "INCONCLUSIVE (residual " + num(residual) + ", Cauchy gap " + num(tr.relative_gap()) + " > " +
           num(tr.tol) + ")\n";
    for (const CauchyStep& s : tr.convergence_log)
      out += "  eps " + num(s.epsilon) + ": distance " + num(s.distance) + "\n";
  }
  return out;
}

std::string sup_line(double excess, double tol) {
  char buf[32];
  std::snprintf(buf, sizeof buf, excess >= 0.1 ? "%.1f" : "%.3g", excess);
  return "sup-norm bound: " + std::string(excess <= tol ? "PASS" : "FAIL") + " (" + buf + " excess)\n";
}

Json region_json(const RegionStats& s) {
  return Json{{"count", s.count}, {"weight", s.weight}, {"mean_error", s.mean_error}, {"max_error", s.max_error}};
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const Tolerances& t) {
  return Json{{"tol_f", t.tol_f},         {"tol_d", t.tol_d},       {"tol_i", t.tol_i},
              {"tol_t", t.tol_t},         {"tol_trace", t.tol_trace}, {"tol_s", t.tol_s},
              {"zero_ext", t.zero_ext},   {"jump_thresh", t.jump_thresh}, {"eps_zero", t.eps_zero}};
}

Tolerances tolerances_from_json(const Json& j) {
  Tolerances t;
  t.tol_f = j.value("tol_f", t.tol_f);
  t.tol_d = j.value("tol_d", t.tol_d);
  t.tol_i = j.value("tol_i", t.tol_i);
  t.tol_t = j.value("tol_t", t.tol_t);
  t.tol_trace = j.value("tol_trace", t.tol_trace);
  t.tol_s = j.value("tol_s", t.tol_s);
  t.zero_ext = j.value("zero_ext", t.zero_ext);
  t.jump_thresh = j.value("jump_thresh", t.jump_thresh);
  t.eps_zero = j.value("eps_zero", t.eps_zero);
  return t;
}

Json to_json(const MollifierSpec& spec) {
  Json charts = Json::array();
  for (const Chart& c : spec.charts)
    charts.push_back(Json{{"center", point(c.center)},
                          {"half_width", c.half_width},
                          {"inward", point(c.inward)},
                          {"lipschitz", c.lipschitz}});
  return Json{{"epsilon", spec.epsilon},
              {"interior_band", spec.interior_band},
              {"charts", std::move(charts)},
              {"alpha_rule", "lip_plus_2"}};
}

MollifierSpec mollifier_spec_from_json(const Json& j) {
  if (j.value("alpha_rule", std::string("lip_plus_2")) != "lip_plus_2")
    throw std::invalid_argument("unsupported alpha_rule");
  MollifierSpec spec;
  spec.epsilon = j.at("epsilon").get<double>();
  spec.interior_band = j.at("interior_band").get<double>();
  for (const Json& c : j.at("charts"))
    spec.charts.push_back(Chart{point_from(c.at("center")), c.at("half_width").get<double>(),
                                point_from(c.at("inward")), c.at("lipschitz").get<double>()});
  return spec;
}

Json to_json(const TraceResult& tr, bool with_values) {
  Json log = Json::array();
  for (const CauchyStep& s : tr.convergence_log) log.push_back(Json{{"epsilon", s.epsilon}, {"distance", s.distance}});
  Json j{{"kind", tr.kind == TraceKind::full ? "full" : "normal"},
         {"converged", tr.converged},
         {"tol", tr.tol},
         {"relative_gap", tr.relative_gap()},
         {"total_mass", tr.measure.total_mass()},
         {"convergence_log", std::move(log)}};
  if (with_values) {
    j["x"] = tr.x;
    if (tr.kind == TraceKind::full) j["y"] = tr.y;
  }
  return j;
}

Json to_json(const Certificate& c) {
  return Json{
      {"verdict", to_string(c.verdict)},
      {"criteria_agree", c.criteria_agree},
      {"grid", Json{{"height", c.u.domain().height()},
                    {"width", c.u.domain().width()},
                    {"h", c.u.domain().spacing()}}},
      {"tv", c.tv},
      {"feasibility", c.feasibility},
      {"zero_ext_ok", c.zero_ext_ok},
      {"div_match", c.div_match},
      {"integral_residual", c.integral_residual},
      {"fulltrace_residual", c.fulltrace_residual},
      {"structure_ok", c.structure_ok},
      {"integral_ok", c.integral_ok},
      {"trace_ok", c.trace_ok},
      {"trace", to_json(c.trace)},
      {"regions", Json{{"jump_thresh", c.regions.jump_thresh},
                       {"eps_zero", c.regions.eps_zero},
                       {"smooth", region_json(c.regions.smooth)},
                       {"jump", region_json(c.regions.jump)},
                       {"zero", region_json(c.regions.zero)}}},
      {"tolerances", to_json(c.tols)}};
}

Json to_json(const IntervalCertificate& c) {
  std::size_t counts[4] = {0, 0, 0, 0};
  Json failures = Json::array();
  for (const SignCheck& s : c.signs) {
    ++counts[static_cast<int>(s.state)];
    if (!s.ok)
      failures.push_back(Json{{"index", s.index}, {"state", to_string(s.state)}, {"coefficient", s.coefficient}});
  }
  return Json{{"verdict", to_string(c.verdict)},
              {"tv", c.tv},
              {"feasibility", c.feasibility},
              {"zero_ext_ok", c.zero_ext_ok},
              {"integral_residual", c.integral_residual},
              {"fulltrace_residual", c.fulltrace_residual},
              {"sign_tol", c.sign_tol},
              {"states", Json{{"fixed", counts[0]}, {"upper", counts[1]}, {"lower", counts[2]}, {"interior", counts[3]}}},
              {"sign_failures", std::move(failures)},
              {"structure_ok", c.structure_ok},
              {"integral_ok", c.integral_ok},
              {"trace_ok", c.trace_ok},
              {"trace", to_json(c.trace)},
              {"tolerances", to_json(c.tols)}};
}

Json to_json(const OracleResult& r) {
  return Json{{"worst", r.worst}, {"scale", r.scale}, {"samples", r.samples}, {"worst_family", to_string(r.worst_family)}};
}

Json to_json(const Shape& s) {
  Json j{{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case ShapeKind::disc:
      j["center"] = point(s.center);
      j["radius"] = s.radius;
      break;
    case ShapeKind::stadium:
      j["center"] = point(s.center);
      j["size"] = point(s.size);
      j["rounding"] = s.rounding;
      break;
    case ShapeKind::polygon: {
      Json v = Json::array();
      for (Vec2 p : s.vertices) v.push_back(point(p));
      j["vertices"] = std::move(v);
      break;
    }
  }
  return j;
}

Shape shape_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  Shape s;
  if (kind == "disc") {
    s = Shape::disc(point_from(j.value("center", Json::array({0.5, 0.5}))), j.at("radius").get<double>());
  } else if (kind == "stadium") {
    s = Shape::stadium(point_from(j.value("center", Json::array({0.5, 0.5}))), point_from(j.at("size")),
                       j.at("rounding").get<double>());
  } else if (kind == "polygon") {
    std::vector<Vec2> v;
    for (const Json& p : j.at("vertices")) v.push_back(point_from(p));
    s = Shape::polygon(std::move(v));
  } else {
    throw std::invalid_argument("unknown shape kind '" + kind + "'");
  }
  s.validate();
  return s;
}

Json to_json(const CalibrabilityReport& r) {
  Json analytic{{"lambda_g", r.lambda_g},
                {"max_curvature", r.max_curvature},
                {"convex", r.convex},
                {"c11", r.c11},
                {"condition", to_string(r.analytic)}};
  if (r.rho_star) analytic["rho_star"] = *r.rho_star;
  Json numerical{{"field_source", r.field_source},
                 {"lambda_h", r.lambda_h},
                 {"feasibility", r.feasibility},
                 {"zero_ext_ok", r.zero_ext_ok},
                 {"identity_residual", r.identity_residual},
                 {"flatness", r.flatness},
                 {"exterior_divergence", r.exterior_divergence},
                 {"trace_alignment", r.trace_alignment},
                 {"trace_converged", r.trace_converged},
                 {"trace_gap", r.trace_gap},
                 {"certified", r.numerical_certified}};
  Json tols{{"tol_f", r.tols.tol_f},         {"tol_identity", r.tols.tol_identity},
            {"tol_t", r.tols.tol_t},
            {"band_pixels", r.tols.band_pixels}, {"tol_gap", r.tols.tol_gap}};
  return Json{{"shape", to_json(r.shape)},
              {"analytic", std::move(analytic)},
              {"numerical", std::move(numerical)},
              {"agree", r.agree},
              {"tolerances", std::move(tols)}};
}

Json to_json(const FlowTrajectory& traj) {
  Json j{{"steps", traj.steps.size()},
         {"times", traj.times},
         {"tv", traj.tv},
         {"minimal_section", traj.minimal_section},
         {"amplitude", traj.amplitude},
         {"gaps", traj.gaps},
         {"max_section_increase", traj.max_section_increase()}};
  j["extinction_time"] = traj.extinction_time ? Json(*traj.extinction_time) : Json(nullptr);
  return j;
}

std::string flow_csv(const FlowTrajectory& traj) {
  std::string out = "t,tv,a0,amplitude\n";
  char buf[128];
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", traj.times[k], traj.tv[k]);
    out += buf;
    if (k < traj.minimal_section.size()) {
      std::snprintf(buf, sizeof buf, "%.17g", traj.minimal_section[k]);
      out += buf;
    }
    out += ',';
    if (k < traj.amplitude.size()) {
      std::snprintf(buf, sizeof buf, "%.17g", traj.amplitude[k]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string render_report(const Certificate& c) {
  const Tolerances& t = c.tols;
  std::string out = "verdict: " + std::string(to_string(c.verdict)) + "\n";
  out += sup_line(c.feasibility, t.tol_f);
  out += line("zero extension", c.zero_ext_ok, "faces leaving the mask within " + num(t.zero_ext));
  out += line("divergence u* = -div g", c.div_match <= t.tol_d, bound(c.div_match, t.tol_d));
  out += line("integral identity", c.integral_ok, bound(c.integral_residual, t.tol_i));
  out += trace_line(c.fulltrace_residual, t.tol_t, c.trace);
  out += "characterizations agree: " + std::string(c.criteria_agree ? "yes" : "no") + "\n";
  return out;
}

std::string render_report(const IntervalCertificate& c) {
  const Tolerances& t = c.tols;
  std::string out = "verdict: " + std::string(to_string(c.verdict)) + "\n";
  out += sup_line(c.feasibility, t.tol_f);
  out += line("zero extension", c.zero_ext_ok, "faces leaving the mask within " + num(t.zero_ext));
  out += line("sign conditions", c.sign_failures == 0,
              std::to_string(c.sign_failures) + " of " + std::to_string(c.signs.size()) + " violated, tol " +
                  num(c.sign_tol));
  out += line("integral identity", c.integral_ok, bound(c.integral_residual, t.tol_i));
  out += trace_line(c.fulltrace_residual, t.tol_t, c.trace);
  return out;
}

std::string render_report(const CalibrabilityReport& r) {
  const CalibrationTolerances& t = r.tols;
  std::string out = "shape: " + std::string(to_string(r.shape.kind)) + "\n";
  out += "analytic condition sup kappa <= lambda_G: " + std::string(to_string(r.analytic)) + " (" +
         num(r.max_curvature) + " vs " + num(r.lambda_g) + ")\n";
  out += sup_line(r.feasibility, t.tol_f);
  out += line("zero extension", r.zero_ext_ok, "exact");
  out += line("divergence identity -div xi = lambda_G", r.identity_residual <= t.tol_identity,
              bound(r.identity_residual, t.tol_identity));
  out += "spread of -div xi on the core of G: " + num(r.flatness) + "\n";
  out += line("trace T xi . nu_G = 1", r.trace_alignment <= t.tol_t, bound(r.trace_alignment, t.tol_t));
  out += "numerical verdict: " + std::string(r.numerical_certified ? "calibrable" : "not certified") + "\n";
  out += "analytic and numerical agree: " + std::string(r.agree ? "yes" : "no") + "\n";
  return out;
}

std::string render_report(const OracleResult& r, double tol_s) {
  return line("subgradient inequality", r.passes(tol_s),
              "worst " + num(r.worst) + " vs " + num(tol_s * r.scale) + " over " + std::to_string(r.samples) +
                  " samples, worst family " + std::string(to_string(r.worst_family)));
}

std::string render_report(const FlowTrajectory& traj) {
  std::string out = "steps: " + std::to_string(traj.steps.size()) + "\n";
  const double inc = traj.max_section_increase();
  const double ref = traj.minimal_section.empty() ? 0.0 : traj.minimal_section.front();
  out += line("minimal section non-increasing", inc <= 1e-6 * ref, "largest increase " + num(inc));
  out += "extinction time: " + (traj.extinction_time ? num(*traj.extinction_time) : std::string("not reached")) + "\n";
  return out;
}

}  // namespace tvcert
