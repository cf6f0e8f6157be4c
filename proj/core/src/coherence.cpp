#include "hlaser/coherence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "gauss_legendre.hpp"
#include "hlaser/errors.hpp"
#include "hlaser/parallel.hpp"
#include "hlaser/sector.hpp"
#include "simplex.hpp"

namespace hlaser {
namespace {

class DensePropagator final : public Propagator {
 public:
  explicit DensePropagator(FlatSuperoperator op) : op_(std::move(op)) {}
  Eigen::VectorXd advance(const Eigen::VectorXd& v, double t) const override {
    return expm_action_dense(op_, v, t);
  }

 private:
  FlatSuperoperator op_;
};

}  // namespace

double coherence(LaserModel& model, const CoherenceOptions& options) {
  double value = 0.0;
  if (options.route == CoherenceRoute::tridiagonal) {
    value = tridiagonal_coherence(model);
  } else {
    const FlatSuperoperator op = build_liouvillian(model);
    const ProjectorQ q(model);
    const Eigen::VectorXd rhs = apply_jump_left(model, steady_vector(model));
    const SolveResult sol = solve_projected(op, q, rhs, options.solve);
    value = -2.0 * flat_trace(apply_jump_right(model, sol.x), model.dim);
  }
  if (!(value > 0.0)) throw NumericalFailure("coherence is not positive", value);
  model.linewidth = 4.0 * model.flux / value;
  return value;
}

std::unique_ptr<Propagator> make_propagator(const LaserModel& model, PropagatorKind kind, const ExpmOptions& expm) {
  switch (kind) {
    case PropagatorKind::krylov:
      return std::make_unique<KrylovPropagator>(build_liouvillian(model), expm);
    case PropagatorKind::dense:
      return std::make_unique<DensePropagator>(build_liouvillian(model));
    case PropagatorKind::automatic:
    case PropagatorKind::sector:
      break;
  }
  return std::make_unique<SectorPropagator>(model, 2);
}

QuadratureResult coherence_quadrature(const LaserModel& model, double horizon, const QuadratureOptions& options) {
  if (!(horizon >= 1.0)) throw ValidationError("quadrature horizon must be at least 1");
  if (options.order < 2) throw ValidationError("quadrature order must be at least 2");
  const auto prop = make_propagator(model, options.propagator, options.expm);
  const detail::GaussRule rule = detail::gauss_legendre(options.order);
  const int d = model.dim;
  const double first_panel = 1.0 / model.decay_diagonal().maxCoeff();
  const double threshold = std::exp(-0.5 * horizon);
  constexpr int kMaxPanels = 200;

  Eigen::VectorXd state = apply_jump_left(model, steady_vector(model));
  double now = 0.0;
  auto g1_at = [&](double s) {
    state = prop->advance(state, s - now);
    now = s;
    return flat_trace(apply_jump_right(model, state), d) / model.flux;
  };

  std::vector<double> times, values;
  QuadratureResult res;
  double a = 0.0;
  double b = first_panel;
  double body = 0.0;
  double end_value = 1.0;
  for (int panel = 0;; ++panel) {
    if (panel == kMaxPanels) throw NumericalFailure("quadrature horizon not reached", end_value);
    const detail::GaussRule r = detail::mapped(rule, a, b);
    for (Eigen::Index i = 0; i < r.nodes.size(); ++i) {
      const double g = g1_at(r.nodes[i]);
      body += r.weights[i] * g;
      times.push_back(r.nodes[i]);
      values.push_back(g);
    }
    end_value = g1_at(b);
    times.push_back(b);
    values.push_back(end_value);
    res.nodes += static_cast<int>(r.nodes.size());
    if (end_value <= threshold) break;
    a = b;
    b *= 2.0;
  }
  const double horizon_time = b;

  // ln g = alpha - k s over the last decade.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.1 * horizon_time || !(values[i] > 0.0)) continue;
    const double y = std::log(values[i]);
    sx += times[i];
    sy += y;
    sxx += times[i] * times[i];
    sxy += times[i] * y;
    ++count;
  }
  if (count < 3) throw NumericalFailure("too few positive samples for the tail fit");
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double alpha = (sy - slope * sx) / count;
  const double rate = -slope;
  if (!(rate > 0.0)) throw NumericalFailure("tail fit gives a nondecaying exponential", rate);
  double ss = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.1 * horizon_time || !(values[i] > 0.0)) continue;
    const double fit = std::exp(alpha - rate * times[i]);
    ss += std::pow((values[i] - fit) / values[i], 2);
  }
  res.tail_fit_residual = std::sqrt(ss / count);
  if (res.tail_fit_residual > 0.01) {
    throw NumericalFailure("tail fit residual above 1%", res.tail_fit_residual);
  }
  const double tail = std::exp(alpha - rate * horizon_time) / rate;

  // Local decay rate at the horizon from the last two samples.
  const std::size_t last = times.size() - 1;
  const double local_rate = -(std::log(values[last]) - std::log(values[last - 1])) / (times[last] - times[last - 1]);
  const double rate_spread = std::abs(local_rate - rate) / rate;

  res.body = model.flux * body;
  res.tail = model.flux * tail;
  res.value = 2.0 * (res.body + res.tail);
  res.horizon_time = horizon_time;
  res.tail_rate = rate;
  res.tail_bound = 2.0 * std::abs(res.tail) * (res.tail_fit_residual + rate_spread);
  return res;
}

ScalingFit fit_power_law(std::vector<ScalingPoint> points, FitWindow window, int min_points) {
  ScalingFit fit;
  fit.window = window;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& p : points) {
    if (p.mu < window.mu_min || p.mu > window.mu_max) continue;
    if (!(p.mu > 0.0) || !(p.coherence > 0.0)) continue;
    const double x = std::log(p.mu), y = std::log(p.coherence);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < std::max(2, min_points)) {
    throw ValidationError("power-law fit needs at least " + std::to_string(std::max(2, min_points)) +
                          " points inside the window, got " + std::to_string(count));
  }
  const double denom = count * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw ValidationError("power-law fit needs distinct mu values");
  fit.exponent = (count * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / count;
  fit.coefficient = std::exp(intercept);
  double ss = 0.0;
  for (const auto& p : points) {
    if (p.mu < window.mu_min || p.mu > window.mu_max) continue;
    const double r = std::log(p.coherence) - (intercept + fit.exponent * std::log(p.mu));
    ss += r * r;
  }
  fit.rms_log_residual = std::sqrt(ss / count);
  fit.used = count;
  fit.points = std::move(points);
  return fit;
}

ScalingFit sweep_and_fit(const std::vector<int>& dims, FitWindow window, const CoherenceOptions& options,
                         const std::function<void(const ScalingPoint&)>& on_point) {
  for (int d : dims) {
    if (d < 2) throw ValidationError("sweep dimension must be at least 2, got " + std::to_string(d));
  }
  std::vector<ScalingPoint> points = parallel_map(dims.size(), [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    LaserModel m = build_model(dims[i]);
    const double c = coherence(m, options);
    ScalingPoint p;
    p.dim = m.dim;
    p.mu = m.mu;
    p.coherence = c;
    p.flux = m.flux;
    p.linewidth = *m.linewidth;
    p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_point) on_point(p);
    return p;
  });
  return fit_power_law(std::move(points), window, 4);
}

double ansatz_fidelity(const Eigen::VectorXd& steady) {
  const LaserModel ansatz = build_model(static_cast<int>(steady.size()));
  const double overlap = (steady.array().sqrt() * ansatz.steady.array().sqrt()).sum();
  return overlap * overlap;
}

OptimizationResult optimize_loss_profile(int dim, long budget, std::uint64_t seed, const Eigen::VectorXd* start_loss) {
  if (dim < 2 || dim > kOptimizerMaxDim) {
    throw ValidationError("optimizer dimension must be in [2, " + std::to_string(kOptimizerMaxDim) + "]");
  }
  if (budget < 1) throw ValidationError("optimizer budget must be at least 1");
  if (start_loss && start_loss->size() != dim - 1) throw ValidationError("start profile has wrong length");

  long evaluations = 0;
  auto objective = [&](const Eigen::VectorXd& p) {
    ++evaluations;
    try {
      return -std::log(tridiagonal_coherence(custom_model(p.array().exp().matrix())));
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Eigen::VectorXd best = start_loss ? Eigen::VectorXd(start_loss->array().log()) : Eigen::VectorXd::Zero(dim - 1);
  double best_value = objective(best);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.5, 1.5);

  OptimizationResult out;
  constexpr long kRestartIterations = 20000;
  while (out.iterations < budget) {
    Eigen::VectorXd step(dim - 1);
    for (Eigen::Index i = 0; i < step.size(); ++i) step[i] = 0.3 * jitter(rng);
    const long cap = std::min(kRestartIterations, budget - out.iterations);
    const detail::SimplexResult r = detail::minimize_simplex(objective, best, step, cap, 1e-9);
    out.iterations += r.iterations;
    const bool improved = r.value < best_value - 1e-12 * std::abs(best_value);
    if (r.value < best_value) {
      best = r.x;
      best_value = r.value;
    }
    if (!improved && r.converged) {
      out.converged = true;
      break;
    }
  }
  out.evaluations = evaluations;
  out.model = custom_model(best.array().exp().matrix());
  out.coherence = coherence(out.model);
  out.fidelity = ansatz_fidelity(out.model.steady);
  return out;
}

}  // namespace hlaser
