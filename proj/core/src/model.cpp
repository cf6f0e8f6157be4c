#include "hlaser/model.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "hlaser/errors.hpp"

namespace hlaser {
namespace {

void fill_moments(LaserModel& m) {
  m.flux = 0.0;
  m.mu = 0.0;
  for (int n = 1; n < m.dim; ++n) {
    m.flux += m.loss[n - 1] * m.loss[n - 1] * m.steady[n];
    m.mu += n * m.steady[n];
  }
}

void normalize_from_logs(Eigen::VectorXd& log_rho) {
  log_rho.array() -= log_rho.maxCoeff();
  log_rho = log_rho.array().exp().matrix();
  log_rho /= log_rho.sum();
}

}  // namespace

Eigen::VectorXd LaserModel::decay_diagonal() const {
  Eigen::VectorXd d(dim);
  for (int n = 0; n < dim; ++n) {
    const double g = gain_at(n + 1);
    const double l = loss_at(n);
    d[n] = g * g + l * l;
  }
  return d;
}

LaserModel build_model(int dim) {
  if (dim < 2) throw ValidationError("dim must be at least 2, got " + std::to_string(dim));
  const double w = std::numbers::pi / (dim + 1);

  LaserModel m;
  m.dim = dim;
  m.gain = Eigen::VectorXd::Ones(dim - 1);
  m.loss.resize(dim - 1);
  for (int n = 1; n < dim; ++n) {
    const double a = std::sin(w * n);
    const double b = std::sin(w * (n + 1));
    m.loss[n - 1] = (a * a) / (b * b);
  }
  Eigen::VectorXd log_rho(dim);
  for (int n = 0; n < dim; ++n) log_rho[n] = 4.0 * std::log(std::sin(w * (n + 1)));
  normalize_from_logs(log_rho);
  m.steady = std::move(log_rho);
  fill_moments(m);
  return m;
}

LaserModel custom_model(const Eigen::VectorXd& loss) {
  if (loss.size() < 1) throw ValidationError("loss vector must have at least one entry");
  for (Eigen::Index i = 0; i < loss.size(); ++i) {
    if (!(loss[i] > 0.0) || !std::isfinite(loss[i])) {
      throw ValidationError("loss entry " + std::to_string(i + 1) + " must be strictly positive");
    }
  }
  LaserModel m;
  m.dim = static_cast<int>(loss.size()) + 1;
  m.gain = Eigen::VectorXd::Ones(m.dim - 1);
  m.loss = loss;
  Eigen::VectorXd log_rho(m.dim);
  log_rho[0] = 0.0;
  for (int n = 1; n < m.dim; ++n) log_rho[n] = log_rho[n - 1] - 2.0 * std::log(loss[n - 1]);
  normalize_from_logs(log_rho);
  m.steady = std::move(log_rho);
  fill_moments(m);
  return m;
}

double phase_covariance_check(const LaserModel& model, double zeta) {
  // long double throughout: angles zeta * n carry ~n ulps of rounding in double
  using Real = long double;
  using Cplx = std::complex<Real>;
  using CMat = Eigen::Matrix<Cplx, Eigen::Dynamic, Eigen::Dynamic>;
  using CVec = Eigen::Matrix<Cplx, Eigen::Dynamic, 1>;
  const int d = model.dim;
  CMat g = CMat::Zero(d, d);
  CMat l = CMat::Zero(d, d);
  CVec phase(d), phase_inv(d);
  const Real two_pi = 2 * std::numbers::pi_v<Real>;
  for (int n = 0; n < d; ++n) {
    phase[n] = std::polar(Real(1), std::remainder(static_cast<Real>(zeta) * n, two_pi));
    phase_inv[n] = std::conj(phase[n]);
  }
  for (int n = 1; n < d; ++n) {
    g(n, n - 1) = model.gain_at(n);
    l(n - 1, n) = model.loss_at(n);
  }
  const CMat lc = phase_inv.asDiagonal() * l * phase.asDiagonal();
  const CMat gc = phase_inv.asDiagonal() * g * phase.asDiagonal();
  const Cplx e = std::polar(Real(1), std::remainder(static_cast<Real>(zeta), two_pi));
  const Real rl = (lc - e * l).cwiseAbs().maxCoeff();
  const Real rg = (gc - std::conj(e) * g).cwiseAbs().maxCoeff();
  return static_cast<double>(std::max(rl, rg));
}

double fixed_point_residual(const LaserModel& model) {
  const auto& rho = model.steady;
  double worst = 0.0;
  for (int n = 0; n < model.dim; ++n) {
    const double gn = model.gain_at(n), gn1 = model.gain_at(n + 1);
    const double ln = model.loss_at(n), ln1 = model.loss_at(n + 1);
    double in = 0.0;
    if (n > 0) in += gn * gn * rho[n - 1];
    if (n + 1 < model.dim) in += ln1 * ln1 * rho[n + 1];
    const double out = (gn1 * gn1 + ln * ln) * rho[n];
    worst = std::max(worst, std::abs(in - out));
  }
  return worst;
}

double recurrence_residual(const LaserModel& model) {
  double worst = 0.0;
  for (int n = 1; n < model.dim; ++n) {
    const double r = model.gain_at(n) / model.loss_at(n);
    const double predicted = r * r * model.steady[n - 1];
    worst = std::max(worst, std::abs(predicted - model.steady[n]) / model.steady[n]);
  }
  return worst;
}

}  // namespace hlaser
