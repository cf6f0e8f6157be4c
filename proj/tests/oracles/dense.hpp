#pragma once

#include <array>

#include <Eigen/Dense>

#include "hlaser/model.hpp"

// Dense reference computations used only by the tests. They rebuild every
// object from the operator definitions (Kronecker products, dense
// exponentials, pseudo-inverses) and share no code path with the library
// beyond the model record itself.
namespace hlaser::oracle {

Eigen::MatrixXd gain_operator(const LaserModel& model);  // <n|G|n-1>
Eigen::MatrixXd loss_operator(const LaserModel& model);  // <n-1|L|n>

// D[X] rho = X rho X^T - (X^T X rho + rho X^T X) / 2 for both jump operators,
// as a D^2 x D^2 matrix on column-stacked operators.
Eigen::MatrixXd kron_liouvillian(const LaserModel& model);

// Coherence by Moore-Penrose inversion of the projected Liouvillian.
double pinv_coherence(const LaserModel& model);

// exp(t L) rho by a dense matrix exponential.
Eigen::MatrixXd evolve(const Eigen::MatrixXd& liouvillian, const Eigen::MatrixXd& rho, double t);

// Tr[L^T e^{sL}(L rho)] / N for s >= 0.
double brute_g1(const LaserModel& model, double s);

// <b^dag(s) b^dag(s') b(t') b(t)> / N^2 with operators applied in time
// order: annihilators multiply from the left, creators (L^T) from the right.
double brute_g2(const LaserModel& model, const std::array<double, 4>& times);

// Max-abs Choi distances between the unitary beam-splitter construction
// (pump and beam qubits kept explicitly on a 4D-dimensional space) and the
// A-matrix construction.
struct ChoiDistances {
  double full = 0.0;
  double cavity = 0.0;
};
ChoiDistances choi_distances(const LaserModel& model, double dt);

}  // namespace hlaser::oracle
