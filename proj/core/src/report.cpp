#include "hlaser/report.hpp"

#include <cmath>
#include <vector>

namespace hlaser {
namespace {

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Json window_json(const FitWindow& w) {
  Json out;
  out["mu_min"] = w.mu_min;
  out["mu_max"] = std::isfinite(w.mu_max) ? Json(w.mu_max) : Json(nullptr);
  return out;
}

}  // namespace

Json to_json(const LaserModel& model) {
  Json out;
  out["dim"] = model.dim;
  out["gain"] = as_vector(model.gain);
  out["loss"] = as_vector(model.loss);
  out["steady"] = as_vector(model.steady);
  out["flux"] = model.flux;
  out["mu"] = model.mu;
  out["linewidth"] = model.linewidth ? Json(*model.linewidth) : Json(nullptr);
  return out;
}

Json to_json(const ScalingFit& fit) {
  Json out;
  out["exponent"] = fit.exponent;
  out["coefficient"] = fit.coefficient;
  out["rms_log_residual"] = fit.rms_log_residual;
  out["window"] = window_json(fit.window);
  out["used"] = fit.used;
  Json points = Json::array();
  for (const ScalingPoint& p : fit.points) {
    points.push_back(Json{{"dim", p.dim}, {"mu", p.mu}, {"coherence", p.coherence}, {"flux", p.flux},
                          {"linewidth", p.linewidth}});
  }
  out["points"] = points;
  return out;
}

Json to_json(const DeltaG2Result& r) {
  Json out;
  out["dim"] = r.dim;
  out["tau"] = r.tau;
  out["argmax"] = r.argmax.as_array();
  out["delta"] = r.delta;
  out["corner_delta"] = r.corner_delta;
  return out;
}

Json to_json(const BoundChain& c) {
  Json out;
  out["mu"] = c.mu;
  out["coherence"] = c.coherence;
  out["lhs"] = c.lhs;
  out["rhs"] = c.rhs;
  out["slack"] = c.slack;
  out["satisfied"] = c.satisfied;
  return out;
}

DiscreteReport discrete_report(const DiscreteModel& dm, const SolveOptions& options) {
  DiscreteReport r;
  r.dim = dm.dim();
  r.gamma = dm.gamma;
  r.isometry_residual = dm.isometry_residual;
  r.fixed_point_residual = transfer_fixed_point_residual(dm);
  r.liouvillian_residual = liouvillian_residual(dm);
  const DiscreteCoherence c = discrete_coherence(dm, options);
  r.discrete_coherence = c.value;
  r.one_site_term = c.one_site_term;
  return r;
}

Json to_json(const DiscreteReport& r) {
  Json out;
  out["dim"] = r.dim;
  out["gamma"] = r.gamma;
  out["isometry_residual"] = r.isometry_residual;
  out["fixed_point_residual"] = r.fixed_point_residual;
  out["liouvillian_residual"] = r.liouvillian_residual;
  out["discrete_coherence"] = r.discrete_coherence;
  out["one_site_term"] = r.one_site_term;
  return out;
}

}  // namespace hlaser
