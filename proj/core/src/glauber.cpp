#include "hlaser/glauber.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hlaser/coherence.hpp"
#include "hlaser/errors.hpp"
#include "hlaser/parallel.hpp"
#include "simplex.hpp"

namespace hlaser {
namespace {

double required_linewidth(const LaserModel& model) {
  if (!model.linewidth) throw ValidationError("linewidth unknown: compute the coherence first");
  return *model.linewidth;
}

}  // namespace

double ideal_g1(const IdealBeam& beam, double s, double t) {
  return std::exp(-0.5 * beam.linewidth * std::abs(s - t));
}

double ideal_g2(const IdealBeam& beam, const FourTimes& x) {
  const double combo = std::abs(x.s - x.t) + std::abs(x.s_prime - x.t_prime) + std::abs(x.s - x.t_prime) +
                       std::abs(x.t - x.s_prime) - std::abs(x.s - x.s_prime) - std::abs(x.t - x.t_prime);
  return std::exp(-0.5 * beam.linewidth * combo);
}

double model_g1(const LaserModel& model, double s, const Propagator& prop) {
  if (!(s >= 0.0)) throw ValidationError("model_g1 takes s >= 0");
  const Eigen::VectorXd v = prop.advance(apply_jump_left(model, steady_vector(model)), s);
  return flat_trace(apply_jump_right(model, v), model.dim) / model.flux;
}

double model_g2(const LaserModel& model, const FourTimes& times, const Propagator& prop) {
  const std::array<double, 4> t = times.as_array();
  // s and s' carry creation operators, t' and t annihilation operators.
  constexpr std::array<bool, 4> creation{true, true, false, false};
  std::array<int, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return t[a] < t[b]; });

  Eigen::VectorXd v = steady_vector(model);
  double now = t[order[0]];
  for (int k : order) {
    if (t[k] > now) {
      v = prop.advance(v, t[k] - now);
      now = t[k];
    }
    v = creation[k] ? apply_jump_right(model, v) : apply_jump_left(model, v);
  }
  return flat_trace(v, model.dim) / (model.flux * model.flux);
}

double filter_window(const LaserModel& model) {
  return std::sqrt(3.0 / (2.0 * model.flux * required_linewidth(model)));
}

DeltaG2Result max_delta_g2(const LaserModel& model, int grid, bool refine, const Propagator* prop) {
  if (grid < 5) throw ValidationError("grid must be at least 5");
  const double ell = required_linewidth(model);
  std::unique_ptr<Propagator> owned;
  if (!prop) {
    owned = make_propagator(model);
    prop = owned.get();
  }
  const IdealBeam beam{ell, model.flux};
  const double tau = filter_window(model);
  auto delta_at = [&](const FourTimes& x) { return std::abs(model_g2(model, x, *prop) - ideal_g2(beam, x)); };

  DeltaG2Result out;
  out.dim = model.dim;
  out.tau = tau;
  std::vector<double> axis(grid);
  for (int i = 0; i < grid; ++i) axis[i] = -tau + 2.0 * tau * i / (grid - 1);
  const std::size_t total = static_cast<std::size_t>(grid) * grid * grid;
  const std::vector<double> deltas = parallel_map(total, [&](std::size_t idx) {
    const auto a = idx / (grid * grid), b = (idx / grid) % grid, c = idx % grid;
    return delta_at(FourTimes{-tau, axis[a], axis[b], axis[c]});
  });
  out.evaluations = static_cast<long>(total);
  const auto best = static_cast<std::size_t>(std::max_element(deltas.begin(), deltas.end()) - deltas.begin());
  out.argmax = FourTimes{-tau, axis[best / (grid * grid)], axis[(best / grid) % grid], axis[best % grid]};
  out.delta = deltas[best];

  if (refine) {
    auto clamp = [&](double x) { return std::clamp(x, -tau, tau); };
    auto objective = [&](const Eigen::VectorXd& p) {
      ++out.evaluations;
      return -delta_at(FourTimes{-tau, clamp(p[0]), clamp(p[1]), clamp(p[2])});
    };
    const Eigen::Vector3d start(out.argmax.s_prime, out.argmax.t_prime, out.argmax.t);
    const Eigen::VectorXd step = Eigen::VectorXd::Constant(3, tau / (grid - 1));
    const detail::SimplexResult r = detail::minimize_simplex(objective, start, step, 400, 1e-8 * tau);
    if (-r.value > out.delta) {
      out.delta = -r.value;
      out.argmax = FourTimes{-tau, clamp(r.x[0]), clamp(r.x[1]), clamp(r.x[2])};
    }
  }

  const double e = kCornerEpsilon;
  const FourTimes corner{-tau, -(1.0 - e) * tau, (1.0 - e) * tau, tau};
  out.corner_delta = delta_at(corner);
  ++out.evaluations;
  if (out.corner_delta > out.delta) {
    out.delta = out.corner_delta;
    out.argmax = corner;
  }
  return out;
}

G1Profile delta_g1_profile(const LaserModel& model, double s_max, int points, const Propagator* prop) {
  if (points < 2) throw ValidationError("profile needs at least 2 points");
  if (!(s_max > 0.0)) throw ValidationError("s_max must be positive");
  const double ell = required_linewidth(model);
  std::unique_ptr<Propagator> owned;
  if (!prop) {
    owned = make_propagator(model);
    prop = owned.get();
  }
  const double end = s_max / ell;
  G1Profile out;
  Eigen::VectorXd state = apply_jump_left(model, steady_vector(model));
  double now = 0.0;
  for (int i = 0; i < points; ++i) {
    const double s = end * i / (points - 1);
    state = prop->advance(state, s - now);
    now = s;
    const double g = flat_trace(apply_jump_right(model, state), model.dim) / model.flux;
    const double ideal = std::exp(-0.5 * ell * s);
    out.s.push_back(s);
    out.model.push_back(g);
    out.ideal.push_back(ideal);
    out.delta.push_back(std::abs(g - ideal));
    out.max_delta = std::max(out.max_delta, out.delta.back());
  }
  return out;
}

}  // namespace hlaser
