#pragma once

#include <nlohmann/json.hpp>

#include "hlaser/bounds.hpp"
#include "hlaser/coherence.hpp"
#include "hlaser/discrete.hpp"
#include "hlaser/glauber.hpp"
#include "hlaser/model.hpp"

namespace hlaser {

using Json = nlohmann::ordered_json;

Json to_json(const LaserModel& model);
Json to_json(const ScalingFit& fit);
Json to_json(const DeltaG2Result& result);
Json to_json(const BoundChain& chain);

struct DiscreteReport {
  int dim = 0;
  double gamma = 0.0;
  double isometry_residual = 0.0;
  double fixed_point_residual = 0.0;
  double liouvillian_residual = 0.0;
  double discrete_coherence = 0.0;
  double one_site_term = 0.0;
};

DiscreteReport discrete_report(const DiscreteModel& dm, const SolveOptions& options = {});
Json to_json(const DiscreteReport& report);

}  // namespace hlaser
