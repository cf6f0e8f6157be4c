#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "hlaser/errors.hpp"
#include "hlaser/superop.hpp"

namespace hlaser {
namespace {

double infinity_norm(const SparseRowMatrix& a) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    double row = 0.0;
    for (SparseRowMatrix::InnerIterator it(a, r); it; ++it) row += std::abs(it.value());
    worst = std::max(worst, row);
  }
  return worst;
}

// Two significant digits, rounded up.
double round_step(double h) {
  const double s = std::pow(10.0, std::floor(std::log10(h)) - 1.0);
  return std::ceil(h / s) * s;
}

}  // namespace

Eigen::VectorXd expm_action(const FlatSuperoperator& op, const Eigen::VectorXd& v, double t,
                            const ExpmOptions& options, ExpmStats* stats) {
  if (!(t >= 0.0)) throw ValidationError("expm_action needs t >= 0");
  if (!(options.tol > 0.0)) throw ValidationError("expm_action needs tol > 0");
  if (v.size() != op.size()) throw ValidationError("expm_action: vector length mismatch");
  ExpmStats local;
  ExpmStats& st = stats ? *stats : local;
  st = {};
  if (t == 0.0) return v;

  const SparseRowMatrix& a = op.matrix;
  const Eigen::Index n = a.rows();
  const double anorm = infinity_norm(a);
  double beta = v.norm();
  if (beta == 0.0 || anorm == 0.0) return v;

  const int m = static_cast<int>(std::max<Eigen::Index>(2, std::min<Eigen::Index>(options.krylov_dim, n)));
  const double tol = options.tol;
  const double btol = 1e-14 * anorm;
  constexpr double kSafety = 0.9;
  constexpr double kSlack = 1.2;
  constexpr double kMinFraction = 1e-3;
  constexpr int kMaxReject = 60;

  const double fact = std::pow((m + 1) / std::numbers::e, m + 1) * std::sqrt(2.0 * std::numbers::pi * (m + 1));
  double t_new = round_step((1.0 / anorm) * std::pow(fact * tol / (4.0 * anorm), 1.0 / m));

  Eigen::MatrixXd basis(n, m + 1);
  Eigen::MatrixXd hess(m + 2, m + 2);
  Eigen::VectorXd p(n);
  Eigen::VectorXd w = v;
  Eigen::MatrixXd expo;
  double t_now = 0.0;

  while (t_now < t) {
    if (++st.steps > options.max_steps) {
      throw NumericalFailure("expm_action: step budget exhausted at t=" + std::to_string(t_now),
                             st.error_estimate);
    }
    double tau = std::min(t - t_now, t_new);
    basis.col(0) = w / beta;
    hess.setZero();
    int mb = m;
    int k1 = 2;
    for (int j = 0; j < m; ++j) {
      p.noalias() = a * basis.col(j);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = basis.leftCols(j + 1).transpose() * p;
        hess.col(j).head(j + 1) += c;
        p.noalias() -= basis.leftCols(j + 1) * c;
      }
      const double s = p.norm();
      if (s < btol) {
        k1 = 0;
        mb = j + 1;
        tau = t - t_now;
        break;
      }
      hess(j + 1, j) = s;
      basis.col(j + 1) = p / s;
    }
    double avnorm = 0.0;
    if (k1 != 0) {
      hess(m + 1, m) = 1.0;
      avnorm = (a * basis.col(m)).norm();
    }

    double err_loc = 0.0;
    double xm = 1.0 / m;
    double eps = 0.0;
    int rejects = 0;
    while (true) {
      const int mx = mb + k1;
      expo = (tau * hess.topLeftCorner(mx, mx)).exp();
      eps = tol * beta * std::max(tau / t, kMinFraction);
      if (k1 == 0) {
        err_loc = btol * tau * beta;
        break;
      }
      const double phi1 = std::abs(beta * expo(m, 0));
      const double phi2 = std::abs(beta * expo(m + 1, 0) * avnorm);
      if (phi1 > 10.0 * phi2) {
        err_loc = phi2;
        xm = 1.0 / m;
      } else if (phi1 > phi2) {
        err_loc = (phi1 * phi2) / (phi1 - phi2);
        xm = 1.0 / m;
      } else {
        err_loc = phi1;
        xm = 1.0 / (m - 1);
      }
      if (err_loc <= kSlack * eps) break;
      tau = round_step(kSafety * tau * std::pow(eps / err_loc, xm));
      ++st.rejections;
      if (++rejects > kMaxReject) {
        throw NumericalFailure("expm_action: step size collapsed", err_loc);
      }
    }

    const int mx = mb + std::max(0, k1 - 1);
    w = basis.leftCols(mx) * (beta * expo.col(0).head(mx));
    beta = w.norm();
    t_now += tau;
    st.error_estimate += err_loc;
    if (beta == 0.0) break;

    double grow = 10.0;
    if (err_loc > 0.0) grow = std::min(grow, kSafety * std::pow(eps / err_loc, xm));
    t_new = round_step(std::max(grow, 1e-3) * tau);
  }
  return w;
}

Eigen::VectorXd expm_action_dense(const FlatSuperoperator& op, const Eigen::VectorXd& v, double t) {
  if (op.dim > kDenseExpmMaxDim) {
    throw ValidationError("dense exponential is limited to dim <= " + std::to_string(kDenseExpmMaxDim));
  }
  if (!(t >= 0.0)) throw ValidationError("expm_action_dense needs t >= 0");
  const Eigen::MatrixXd a = Eigen::MatrixXd(op.matrix) * t;
  return a.exp() * v;
}

}  // namespace hlaser
