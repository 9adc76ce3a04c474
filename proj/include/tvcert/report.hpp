#pragma once
// JSON records, the flow CSV and plain-text reports. Objects keep insertion
// order so that identical runs produce identical bytes.

#include <string>

#include <json.hpp>

#include "tvcert/calibrate.hpp"
#include "tvcert/dual_fields.hpp"
#include "tvcert/subdiff_certify.hpp"
#include "tvcert/trace_ops.hpp"
#include "tvcert/tv_flow.hpp"

namespace tvcert {

using Json = nlohmann::ordered_json;

/// Two-space indented, trailing newline.
std::string dump(const Json& j);

Json to_json(const Tolerances& t);
Tolerances tolerances_from_json(const Json& j);

Json to_json(const MollifierSpec& spec);
MollifierSpec mollifier_spec_from_json(const Json& j);

/// Per-pixel trace values are included only on request.
Json to_json(const TraceResult& trace, bool with_values = false);

Json to_json(const Certificate& c);
Json to_json(const IntervalCertificate& c);
Json to_json(const OracleResult& r);

Json to_json(const Shape& s);
Shape shape_from_json(const Json& j);
Json to_json(const CalibrabilityReport& r);

Json to_json(const FlowTrajectory& traj);
/// Header "t,tv,a0,amplitude"; A0 of the last state is left empty.
std::string flow_csv(const FlowTrajectory& traj);

/// One line per checked condition: name, PASS/FAIL/INCONCLUSIVE, residual and tolerance.
std::string render_report(const Certificate& c);
std::string render_report(const IntervalCertificate& c);
std::string render_report(const CalibrabilityReport& r);
std::string render_report(const OracleResult& r, double tol_s);
std::string render_report(const FlowTrajectory& traj);

}  // namespace tvcert
