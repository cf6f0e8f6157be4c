#pragma once

#include <array>
#include <vector>

#include "hlaser/model.hpp"
#include "hlaser/superop.hpp"

namespace hlaser {

// Phase-diffusing coherent beam with linewidth l and flux N.
struct IdealBeam {
  double linewidth = 0.0;
  double flux = 1.0;
};

// Arguments of <b^dag(s) b^dag(s') b(t') b(t)>.
struct FourTimes {
  double s = 0.0;
  double s_prime = 0.0;
  double t_prime = 0.0;
  double t = 0.0;

  std::array<double, 4> as_array() const { return {s, s_prime, t_prime, t}; }
};

double ideal_g1(const IdealBeam& beam, double s, double t);
double ideal_g2(const IdealBeam& beam, const FourTimes& times);

// Normalized g1(s) = Tr[L^dag e^{s L}(L rho)] / N for s >= 0.
double model_g1(const LaserModel& model, double s, const Propagator& prop);

// Normalized g2 by quantum regression: sort the four times, start from rho_ss,
// apply L on the left at annihilation times (t, t') and L^T on the right at
// creation times (s, s'), propagate across the gaps, close with the trace.
double model_g2(const LaserModel& model, const FourTimes& times, const Propagator& prop);

// Filter window sqrt(3 / (2 N l)); needs the linewidth.
double filter_window(const LaserModel& model);

struct DeltaG2Result {
  int dim = 0;
  double tau = 0.0;
  FourTimes argmax;
  double delta = 0.0;         // max |g2_model - g2_ideal| found
  double corner_delta = 0.0;  // at (-tau, -(1-eps) tau, (1-eps) tau, tau)
  long evaluations = 0;
};

inline constexpr double kCornerEpsilon = 1e-3;

/// Largest |g2_model - g2_ideal| with s = -tau and (s', t', t) in [-tau, tau]^3:
/// a grid^3 lattice scan, optional Nelder-Mead polish, and the corner point.
DeltaG2Result max_delta_g2(const LaserModel& model, int grid = 9, bool refine = true,
                           const Propagator* prop = nullptr);

struct G1Profile {
  std::vector<double> s;
  std::vector<double> model;
  std::vector<double> ideal;
  std::vector<double> delta;
  double max_delta = 0.0;
};

/// |g1_model(s) - exp(-l s / 2)| on `points` equally spaced s in [0, s_max / l].
G1Profile delta_g1_profile(const LaserModel& model, double s_max = 10.0, int points = 201,
                           const Propagator* prop = nullptr);

}  // namespace hlaser
