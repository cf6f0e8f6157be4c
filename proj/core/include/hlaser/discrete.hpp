#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hlaser/model.hpp"
#include "hlaser/superop.hpp"

namespace hlaser {

// One time step of the beam as an isometry V = sum_j A_j kron |j>, where the
// output qubit pair is j = 2 * beam + sink. A0 is gain (subdiagonal), A1 no
// event (diagonal), A2 is zero, A3 is loss into the beam (superdiagonal).
struct DiscreteModel {
  LaserModel source;
  double gamma = 0.0;
  Eigen::SparseMatrix<double> a0, a1, a2, a3;
  double isometry_residual = 0.0;  // max |sum_j A_j^T A_j - I|

  int dim() const { return source.dim; }
};

inline constexpr double kGammaMargin = 1e-9;

DiscreteModel build_discrete(const LaserModel& model, double gamma);

/// T = sum_j A_j kron A_j.
FlatSuperoperator transfer_matrix(const DiscreteModel& dm);

/// T - I with the diagonal formed without cancellation.
FlatSuperoperator transfer_generator(const DiscreteModel& dm);

/// max |(T - I) / gamma^2 - Liouvillian|.
double liouvillian_residual(const DiscreteModel& dm);

/// max |T vec(rho_ss) - vec(rho_ss)|.
double transfer_fixed_point_residual(const DiscreteModel& dm);

struct DiscreteCoherence {
  double value = 0.0;          // two-site sum 2 (s+| inv(I - Q T Q) |s-)
  double one_site_term = 0.0;  // (1| T_{s+ s-} |1), reported separately
};

DiscreteCoherence discrete_coherence(const DiscreteModel& dm, const SolveOptions& options = {});

// Dense 2D x 2D unitaries on cavity kron qubit (qubit index fastest).
Eigen::MatrixXd gain_unitary(const LaserModel& model, double dt);
Eigen::MatrixXd loss_unitary(const LaserModel& model, double dt);

struct ChannelDistance {
  double distance = 0.0;         // cavity + beam qubit Choi matrices, max-abs
  double cavity_distance = 0.0;  // after also tracing out the beam qubit
};

/// Compares the gain/loss unitary pair (pump qubit in |1>, beam qubit in |0>,
/// pump traced out) with the A-matrix map (sink traced out).
ChannelDistance channel_equivalence(const LaserModel& model, double dt);

}  // namespace hlaser
