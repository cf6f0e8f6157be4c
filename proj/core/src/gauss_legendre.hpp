#pragma once

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace hlaser::detail {

struct GaussRule {
  Eigen::VectorXd nodes;    // on [-1, 1]
  Eigen::VectorXd weights;
};

// Golub-Welsch: eigenvalues of the Jacobi matrix of the Legendre recurrence.
inline GaussRule gauss_legendre(int order) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd off(order - 1);
  for (int k = 1; k < order; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  GaussRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return rule;
}

// Rule mapped to [a, b].
inline GaussRule mapped(const GaussRule& r, double a, double b) {
  GaussRule out;
  const double half = 0.5 * (b - a);
  out.nodes = (r.nodes.array() + 1.0) * half + a;
  out.weights = r.weights * half;
  return out;
}

}  // namespace hlaser::detail
