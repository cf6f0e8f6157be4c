#pragma once

#include <optional>

#include <Eigen/Dense>

namespace hlaser {

/// Continuum-limit laser: a D-level cavity with single-step gain and loss.
///
/// Gain and loss amplitudes are stored for n = 1..D-1, so `gain[n-1]` is the
/// matrix element <n|G|n-1> and `loss[n-1]` is <n-1|L|n>. The steady state is
/// diagonal in the number basis.
struct LaserModel {
  int dim = 0;
  Eigen::VectorXd gain;
  Eigen::VectorXd loss;
  Eigen::VectorXd steady;
  double flux = 0.0;
  double mu = 0.0;
  std::optional<double> linewidth;  // set once the coherence is known

  // Amplitudes indexed by level; zero outside 1..D-1.
  double gain_at(int n) const { return (n >= 1 && n < dim) ? gain[n - 1] : 0.0; }
  double loss_at(int n) const { return (n >= 1 && n < dim) ? loss[n - 1] : 0.0; }

  // Diagonal of G^T G + L^T L.
  Eigen::VectorXd decay_diagonal() const;
};

/// The sin^4 family: rho_n ~ sin^4(pi (n+1)/(D+1)) with unit gain.
LaserModel build_model(int dim);

/// Unit gain with the given loss diagonal (length D-1, strictly positive).
LaserModel custom_model(const Eigen::VectorXd& loss);

/// Max deviation of U^-z L U^z = e^{iz} L and U^-z G U^z = e^{-iz} G.
double phase_covariance_check(const LaserModel& model, double zeta);

/// Max entrywise residual of the diagonal balance equation at the steady state.
double fixed_point_residual(const LaserModel& model);

/// Max relative residual of rho_n = (G_n / L_n)^2 rho_{n-1}.
double recurrence_residual(const LaserModel& model);

}  // namespace hlaser
