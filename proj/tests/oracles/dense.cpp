#include "dense.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace hlaser::oracle {
namespace {

Eigen::VectorXd vec(const Eigen::MatrixXd& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, int d) { return Eigen::Map<const Eigen::MatrixXd>(v.data(), d, d); }

Eigen::MatrixXd dissipator(const Eigen::MatrixXd& x) {
  const int d = static_cast<int>(x.rows());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd xtx = x.transpose() * x;
  return Eigen::kroneckerProduct(x, x).eval() - 0.5 * Eigen::kroneckerProduct(eye, xtx).eval() -
         0.5 * Eigen::kroneckerProduct(xtx.transpose(), eye).eval();
}

}  // namespace

Eigen::MatrixXd gain_operator(const LaserModel& model) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(model.dim, model.dim);
  for (int n = 1; n < model.dim; ++n) g(n, n - 1) = model.gain[n - 1];
  return g;
}

Eigen::MatrixXd loss_operator(const LaserModel& model) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(model.dim, model.dim);
  for (int n = 1; n < model.dim; ++n) l(n - 1, n) = model.loss[n - 1];
  return l;
}

Eigen::MatrixXd kron_liouvillian(const LaserModel& model) {
  return dissipator(gain_operator(model)) + dissipator(loss_operator(model));
}

double pinv_coherence(const LaserModel& model) {
  const int d = model.dim;
  const Eigen::MatrixXd rho = model.steady.asDiagonal();
  const Eigen::MatrixXd l = loss_operator(model);
  const Eigen::VectorXd one = vec(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d * d, d * d) - vec(rho) * one.transpose();
  const Eigen::MatrixXd projected = q * kron_liouvillian(model) * q;
  const Eigen::MatrixXd pinv = projected.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::MatrixXd x = unvec(pinv * (q * vec(l * rho)), d);
  return -2.0 * (l.transpose() * x).trace();
}

Eigen::MatrixXd evolve(const Eigen::MatrixXd& liouvillian, const Eigen::MatrixXd& rho, double t) {
  const Eigen::MatrixXd prop = (t * liouvillian).exp();
  return unvec(prop * vec(rho), static_cast<int>(rho.rows()));
}

double brute_g1(const LaserModel& model, double s) {
  const Eigen::MatrixXd l = loss_operator(model);
  const Eigen::MatrixXd rho = model.steady.asDiagonal();
  const Eigen::MatrixXd x = evolve(kron_liouvillian(model), l * rho, s);
  return (l.transpose() * x).trace() / model.flux;
}

double brute_g2(const LaserModel& model, const std::array<double, 4>& times) {
  const Eigen::MatrixXd lv = kron_liouvillian(model);
  const Eigen::MatrixXd l = loss_operator(model);
  std::array<int, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return times[a] < times[b]; });
  Eigen::MatrixXd x = model.steady.asDiagonal();
  double clock = times[order[0]];
  for (int k : order) {
    x = evolve(lv, x, times[k] - clock);
    clock = times[k];
    if (k < 2) x = x * l.transpose();  // b^dag(s), b^dag(s')
    else x = l * x;                    // b(t'), b(t)
  }
  return x.trace() / (model.flux * model.flux);
}

ChoiDistances choi_distances(const LaserModel& model, double dt) {
  const int d = model.dim;
  const Eigen::MatrixXd g = gain_operator(model), l = loss_operator(model);
  const Eigen::Matrix2d lower = (Eigen::Matrix2d() << 0, 1, 0, 0).finished();
  const Eigen::Matrix2d eye2 = Eigen::Matrix2d::Identity();
  const double amp = std::sqrt(dt);
  // Ordering: cavity kron pump kron beam.
  const Eigen::MatrixXd gain_gen = Eigen::kroneckerProduct(
      Eigen::MatrixXd(Eigen::kroneckerProduct(g, lower) - Eigen::kroneckerProduct(g.transpose(), lower.transpose())),
      eye2);
  const Eigen::MatrixXd cav_beam_loss =
      Eigen::kroneckerProduct(l, lower.transpose()) - Eigen::kroneckerProduct(l.transpose(), lower);
  // Insert the pump identity between cavity and beam.
  Eigen::MatrixXd loss_gen = Eigen::MatrixXd::Zero(4 * d, 4 * d);
  for (int c1 = 0; c1 < d; ++c1)
    for (int b1 = 0; b1 < 2; ++b1)
      for (int c2 = 0; c2 < d; ++c2)
        for (int b2 = 0; b2 < 2; ++b2)
          for (int p = 0; p < 2; ++p) loss_gen(4 * c1 + 2 * p + b1, 4 * c2 + 2 * p + b2) = cav_beam_loss(2 * c1 + b1, 2 * c2 + b2);
  const Eigen::MatrixXd u = (amp * loss_gen).exp() * (amp * gain_gen).exp();

  // Channel: rho -> Tr_pump[U (rho kron |1><1| kron |0><0|) U^T] on cavity kron beam.
  const int out = 2 * d;
  Eigen::MatrixXd choi_u = Eigen::MatrixXd::Zero(out * d, out * d);
  Eigen::MatrixXd choi_u_cav = Eigen::MatrixXd::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXd in = Eigen::MatrixXd::Zero(4 * d, 4 * d);
      in(4 * i + 2, 4 * j + 2) = 1.0;  // pump |1>, beam |0>
      const Eigen::MatrixXd full = u * in * u.transpose();
      Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(out, out);
      for (int c1 = 0; c1 < d; ++c1)
        for (int b1 = 0; b1 < 2; ++b1)
          for (int c2 = 0; c2 < d; ++c2)
            for (int b2 = 0; b2 < 2; ++b2)
              for (int p = 0; p < 2; ++p) reduced(2 * c1 + b1, 2 * c2 + b2) += full(4 * c1 + 2 * p + b1, 4 * c2 + 2 * p + b2);
      Eigen::MatrixXd cav = Eigen::MatrixXd::Zero(d, d);
      for (int c1 = 0; c1 < d; ++c1)
        for (int c2 = 0; c2 < d; ++c2) cav(c1, c2) = reduced(2 * c1, 2 * c2) + reduced(2 * c1 + 1, 2 * c2 + 1);
      // Choi entry ((r, i), (c, j)).
      for (int r = 0; r < out; ++r)
        for (int c = 0; c < out; ++c) choi_u(r + out * i, c + out * j) = reduced(r, c);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) choi_u_cav(r + d * i, c + d * j) = cav(r, c);
    }
  }

  // A-matrix route: sink 0 -> A0 kron |0>_beam, sink 1 -> A1 kron |0> + A3 kron |1>.
  Eigen::VectorXd decay(d);
  for (int n = 0; n < d; ++n) {
    const double gn = n + 1 < d ? model.gain[n] : 0.0;
    const double ln = n > 0 ? model.loss[n - 1] : 0.0;
    decay[n] = gn * gn + ln * ln;
  }
  const Eigen::MatrixXd a0 = amp * g;
  const Eigen::MatrixXd a1 = (1.0 - dt * decay.array()).sqrt().matrix().asDiagonal();
  const Eigen::MatrixXd a3 = amp * l;
  Eigen::MatrixXd k0 = Eigen::MatrixXd::Zero(out, d), k1 = Eigen::MatrixXd::Zero(out, d);
  for (int r = 0; r < d; ++r) {
    k0.row(2 * r) = a0.row(r);
    k1.row(2 * r) = a1.row(r);
    k1.row(2 * r + 1) = a3.row(r);
  }
  Eigen::MatrixXd choi_a = Eigen::MatrixXd::Zero(out * d, out * d);
  Eigen::MatrixXd choi_a_cav = Eigen::MatrixXd::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Eigen::MatrixXd reduced = k0.col(i) * k0.col(j).transpose() + k1.col(i) * k1.col(j).transpose();
      for (int r = 0; r < out; ++r)
        for (int c = 0; c < out; ++c) choi_a(r + out * i, c + out * j) = reduced(r, c);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          choi_a_cav(r + d * i, c + d * j) = reduced(2 * r, 2 * c) + reduced(2 * r + 1, 2 * c + 1);
    }
  }
  return {(choi_u - choi_a).cwiseAbs().maxCoeff(), (choi_u_cav - choi_a_cav).cwiseAbs().maxCoeff()};
}

}  // namespace hlaser::oracle
