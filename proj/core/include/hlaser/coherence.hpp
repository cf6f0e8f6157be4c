#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "hlaser/model.hpp"
#include "hlaser/superop.hpp"

namespace hlaser {

enum class CoherenceRoute {
  projected,    // projected solve on the full flattened space
  tridiagonal,  // offset -1 block only
};

struct CoherenceOptions {
  CoherenceRoute route = CoherenceRoute::projected;
  SolveOptions solve;
};

/// Coherence c = -2 (1|(L kron I) x with (Q L Q) x = (I kron L)|1).
/// Also stores the linewidth 4 N / c in the model.
double coherence(LaserModel& model, const CoherenceOptions& options = {});

enum class PropagatorKind { automatic, krylov, sector, dense };

// Builds the propagator used for correlation functions. `automatic` picks the
// sector propagator, which is exact for any time.
std::unique_ptr<Propagator> make_propagator(const LaserModel& model, PropagatorKind kind = PropagatorKind::automatic,
                                            const ExpmOptions& expm = {});

struct QuadratureOptions {
  PropagatorKind propagator = PropagatorKind::krylov;
  int order = 16;  // Gauss-Legendre nodes per panel
  ExpmOptions expm{30, 1e-13};
};

struct QuadratureResult {
  double value = 0.0;        // 2 * (body + tail)
  double body = 0.0;         // integral of G1 over [0, T]
  double tail = 0.0;         // fitted exponential beyond T
  double horizon_time = 0.0; // T
  double tail_rate = 0.0;
  double tail_fit_residual = 0.0;  // rms relative residual of the fit
  double tail_bound = 0.0;   // error bound on 2 * tail
  int nodes = 0;
};

/// Time-domain coherence: integrates G1(s) on geometric Gauss-Legendre panels
/// until g1 has decayed below exp(-horizon / 2), then adds an exponential tail
/// fitted over the last decade of the integration range.
QuadratureResult coherence_quadrature(const LaserModel& model, double horizon = 20.0,
                                      const QuadratureOptions& options = {});

struct ScalingPoint {
  int dim = 0;
  double mu = 0.0;
  double coherence = 0.0;
  double flux = 0.0;
  double linewidth = 0.0;
  double seconds = 0.0;
};

struct FitWindow {
  double mu_min = 24.5;  // excludes D < 50 for the sin^4 family
  double mu_max = std::numeric_limits<double>::infinity();
};

struct ScalingFit {
  std::vector<ScalingPoint> points;
  double exponent = 0.0;
  double coefficient = 0.0;
  double rms_log_residual = 0.0;
  FitWindow window;
  int used = 0;
};

/// Least squares of ln c against ln mu over the points inside the window.
ScalingFit fit_power_law(std::vector<ScalingPoint> points, FitWindow window, int min_points = 2);

/// Coherence for each dimension (in parallel), then the power-law fit.
/// `on_point` (optional) is called as each dimension finishes, possibly from
/// a worker thread.
ScalingFit sweep_and_fit(const std::vector<int>& dims, FitWindow window = {},
                         const CoherenceOptions& options = {},
                         const std::function<void(const ScalingPoint&)>& on_point = {});

struct OptimizationResult {
  LaserModel model;
  double coherence = 0.0;
  double fidelity = 0.0;  // (sum sqrt(rho) sqrt(rho_ansatz))^2 against sin^4
  bool converged = false;
  long iterations = 0;
  long evaluations = 0;
};

inline constexpr int kOptimizerMaxDim = 60;

/// Maximizes the coherence over positive loss profiles by Nelder-Mead in
/// log-parameters, restarting from the incumbent until the budget
/// (simplex iterations) runs out or a restart stops improving.
OptimizationResult optimize_loss_profile(int dim, long budget, std::uint64_t seed = 1,
                                         const Eigen::VectorXd* start_loss = nullptr);

/// Overlap fidelity of a steady state with the sin^4 family of the same size.
double ansatz_fidelity(const Eigen::VectorXd& steady);

}  // namespace hlaser
