#include "hlaser/discrete.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "hlaser/errors.hpp"

namespace hlaser {
namespace {

using Sparse = Eigen::SparseMatrix<double>;

double sparse_max_abs(const Sparse& m) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (Sparse::InnerIterator it(m, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

Eigen::MatrixXd gain_matrix(const LaserModel& model) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(model.dim, model.dim);
  for (int n = 1; n < model.dim; ++n) g(n, n - 1) = model.gain_at(n);
  return g;
}

Eigen::MatrixXd loss_matrix(const LaserModel& model) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(model.dim, model.dim);
  for (int n = 1; n < model.dim; ++n) l(n - 1, n) = model.loss_at(n);
  return l;
}

const Eigen::Matrix2d kLower = (Eigen::Matrix2d() << 0.0, 1.0, 0.0, 0.0).finished();  // |0><1|
const Eigen::Matrix2d kRaise = kLower.transpose();

// Choi matrix sum_k vec(K_k) vec(K_k)^T of a map given by Kraus operators.
Eigen::MatrixXd choi(const std::vector<Eigen::MatrixXd>& kraus) {
  const Eigen::Index len = kraus.front().size();
  Eigen::MatrixXd z(len, static_cast<Eigen::Index>(kraus.size()));
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    z.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(kraus[k].data(), len);
  }
  return z * z.transpose();
}

}  // namespace

DiscreteModel build_discrete(const LaserModel& model, double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  const int d = model.dim;
  const Eigen::VectorXd decay = model.decay_diagonal();
  const double g2 = gamma * gamma;
  for (int n = 0; n < d; ++n) {
    if (!(g2 * decay[n] < 1.0 - kGammaMargin)) {
      throw ValidationError("gamma too large: gamma^2 * decay[" + std::to_string(n) + "] = " +
                            std::to_string(g2 * decay[n]) + " must stay below 1");
    }
  }
  DiscreteModel dm;
  dm.source = model;
  dm.gamma = gamma;
  std::vector<Eigen::Triplet<double>> t0, t1, t3;
  for (int n = 0; n < d; ++n) {
    t1.emplace_back(n, n, std::sqrt(1.0 - g2 * decay[n]));
    if (n >= 1) {
      t0.emplace_back(n, n - 1, gamma * model.gain_at(n));
      t3.emplace_back(n - 1, n, gamma * model.loss_at(n));
    }
  }
  for (auto* m : {&dm.a0, &dm.a1, &dm.a2, &dm.a3}) m->resize(d, d);
  dm.a0.setFromTriplets(t0.begin(), t0.end());
  dm.a1.setFromTriplets(t1.begin(), t1.end());
  dm.a3.setFromTriplets(t3.begin(), t3.end());

  Sparse iso = Sparse(dm.a0.transpose() * dm.a0) + Sparse(dm.a1.transpose() * dm.a1) +
               Sparse(dm.a2.transpose() * dm.a2) + Sparse(dm.a3.transpose() * dm.a3);
  Sparse eye(d, d);
  eye.setIdentity();
  dm.isometry_residual = sparse_max_abs(iso - eye);
  return dm;
}

FlatSuperoperator transfer_matrix(const DiscreteModel& dm) {
  Sparse t = Eigen::kroneckerProduct(dm.a0, dm.a0).eval();
  t += Eigen::kroneckerProduct(dm.a1, dm.a1).eval();
  t += Eigen::kroneckerProduct(dm.a2, dm.a2).eval();
  t += Eigen::kroneckerProduct(dm.a3, dm.a3).eval();
  FlatSuperoperator op;
  op.dim = dm.dim();
  op.kind = SuperopKind::transfer;
  op.matrix = t;
  op.matrix.makeCompressed();
  return op;
}

FlatSuperoperator transfer_generator(const DiscreteModel& dm) {
  const LaserModel& model = dm.source;
  const int d = model.dim;
  const double g2 = dm.gamma * dm.gamma;
  const Eigen::VectorXd x = g2 * model.decay_diagonal();
  const Eigen::VectorXd a = (1.0 - x.array()).sqrt();
  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < d; ++col) {
    for (int row = 0; row < d; ++row) {
      const Eigen::Index i = flat_index(row, col, d);
      if (row >= 1 && col >= 1) {
        triplets.emplace_back(i, flat_index(row - 1, col - 1, d), g2 * model.gain_at(row) * model.gain_at(col));
      }
      if (row + 1 < d && col + 1 < d) {
        triplets.emplace_back(i, flat_index(row + 1, col + 1, d),
                              g2 * model.loss_at(row + 1) * model.loss_at(col + 1));
      }
      // a_m a_n - 1 = (-x_m - x_n + x_m x_n) / (a_m a_n + 1)
      triplets.emplace_back(i, i, (-x[row] - x[col] + x[row] * x[col]) / (a[row] * a[col] + 1.0));
    }
  }
  FlatSuperoperator op;
  op.dim = d;
  op.kind = SuperopKind::transfer_generator;
  op.matrix.resize(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

double liouvillian_residual(const DiscreteModel& dm) {
  const double g2 = dm.gamma * dm.gamma;
  const SparseRowMatrix diff = transfer_generator(dm).matrix / g2 - build_liouvillian(dm.source).matrix;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseRowMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

double transfer_fixed_point_residual(const DiscreteModel& dm) {
  const Eigen::VectorXd v = steady_vector(dm.source);
  return (transfer_matrix(dm).matrix * v - v).cwiseAbs().maxCoeff();
}

DiscreteCoherence discrete_coherence(const DiscreteModel& dm, const SolveOptions& options) {
  const LaserModel& model = dm.source;
  const Eigen::MatrixXd rho = model.steady.asDiagonal();
  const Eigen::MatrixXd a1 = dm.a1, a3 = dm.a3;
  // |s-) = vec(A3 rho A1^T); (s+| x = Tr(A1 X A3^T) = vec(A1^T A3) . x
  const Eigen::VectorXd lower = flatten(a3 * rho * a1.transpose());
  const Eigen::VectorXd raise = flatten(a1.transpose() * a3);
  const SolveResult sol = solve_projected(transfer_generator(dm), ProjectorQ(model), lower, options);
  DiscreteCoherence out;
  out.value = -2.0 * raise.dot(sol.x);
  out.one_site_term = (a3 * rho * a3.transpose()).trace();
  if (!(out.value > 0.0)) throw NumericalFailure("discrete coherence is not positive", out.value);
  return out;
}

Eigen::MatrixXd gain_unitary(const LaserModel& model, double dt) {
  if (!(dt >= 0.0)) throw ValidationError("dt must be nonnegative");
  const Eigen::MatrixXd g = gain_matrix(model);
  const Eigen::MatrixXd gen = std::sqrt(dt) * (Eigen::MatrixXd(Eigen::kroneckerProduct(g, kLower)) -
                                               Eigen::MatrixXd(Eigen::kroneckerProduct(g.transpose(), kRaise)));
  return gen.exp();
}

Eigen::MatrixXd loss_unitary(const LaserModel& model, double dt) {
  if (!(dt >= 0.0)) throw ValidationError("dt must be nonnegative");
  const Eigen::MatrixXd l = loss_matrix(model);
  const Eigen::MatrixXd gen = std::sqrt(dt) * (Eigen::MatrixXd(Eigen::kroneckerProduct(l, kRaise)) -
                                               Eigen::MatrixXd(Eigen::kroneckerProduct(l.transpose(), kLower)));
  return gen.exp();
}

ChannelDistance channel_equivalence(const LaserModel& model, double dt) {
  const int d = model.dim;
  const DiscreteModel dm = build_discrete(model, std::sqrt(dt));
  const Eigen::MatrixXd ucl = gain_unitary(model, dt);
  const Eigen::MatrixXd ucr = loss_unitary(model, dt);

  // Cavity blocks <q'| U |q> of a cavity kron qubit operator.
  auto block = [d](const Eigen::MatrixXd& u, int out_q, int in_q) {
    Eigen::MatrixXd b(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) b(r, c) = u(2 * r + out_q, 2 * c + in_q);
    }
    return b;
  };
  // Stack beam components into a 2D x D operator (beam index fastest).
  auto stack = [d](const Eigen::MatrixXd& beam0, const Eigen::MatrixXd& beam1) {
    Eigen::MatrixXd w(2 * d, d);
    for (int r = 0; r < d; ++r) {
      w.row(2 * r) = beam0.row(r);
      w.row(2 * r + 1) = beam1.row(r);
    }
    return w;
  };

  std::vector<Eigen::MatrixXd> unitary_route, matrix_route, unitary_cavity, matrix_cavity;
  for (int pump = 0; pump < 2; ++pump) {
    const Eigen::MatrixXd k = block(ucl, pump, 1);
    const Eigen::MatrixXd b0 = block(ucr, 0, 0) * k;
    const Eigen::MatrixXd b1 = block(ucr, 1, 0) * k;
    unitary_route.push_back(stack(b0, b1));
    unitary_cavity.push_back(b0);
    unitary_cavity.push_back(b1);
  }
  const Eigen::MatrixXd a0 = dm.a0, a1 = dm.a1, a2 = dm.a2, a3 = dm.a3;
  matrix_route.push_back(stack(a0, a2));  // sink 0
  matrix_route.push_back(stack(a1, a3));  // sink 1
  for (const auto* a : {&a0, &a1, &a2, &a3}) matrix_cavity.push_back(*a);

  ChannelDistance out;
  out.distance = (choi(unitary_route) - choi(matrix_route)).cwiseAbs().maxCoeff();
  out.cavity_distance = (choi(unitary_cavity) - choi(matrix_cavity)).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace hlaser
