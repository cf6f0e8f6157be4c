#include "hlaser/sector.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "hlaser/errors.hpp"

namespace hlaser {
namespace {

struct Chain {
  std::vector<int> rows, cols;
  Eigen::VectorXd diag;   // length len
  Eigen::VectorXd sym;    // length len-1, symmetric off-diagonal
  Eigen::VectorXd log_scale;
};

// Tridiagonal chain of the block at offset k = row - col, ordered by col.
Chain make_chain(const LaserModel& model, const Eigen::VectorXd& decay, int k) {
  const int d = model.dim;
  const int first = std::max(0, -k);
  const int len = d - std::abs(k);
  Chain c;
  c.rows.resize(len);
  c.cols.resize(len);
  c.diag.resize(len);
  c.sym.resize(std::max(0, len - 1));
  c.log_scale.resize(len);
  for (int i = 0; i < len; ++i) {
    const int n = first + i;
    const int m = n + k;
    c.rows[i] = m;
    c.cols[i] = n;
    c.diag[i] = -0.5 * (decay[m] + decay[n]);
    if (i == 0) {
      c.log_scale[i] = 0.0;
      continue;
    }
    const double up = model.loss_at(m) * model.loss_at(n);    // (i-1, i)
    const double down = model.gain_at(m) * model.gain_at(n);  // (i, i-1)
    if (!(up > 0.0) || !(down > 0.0)) {
      throw ValidationError("sector decomposition needs strictly positive gain and loss");
    }
    c.sym[i - 1] = std::sqrt(up * down);
    c.log_scale[i] = c.log_scale[i - 1] + 0.5 * (std::log(up) - std::log(down));
  }
  if (len > 0) c.log_scale.array() -= c.log_scale.mean();
  return c;
}

}  // namespace

SectorPropagator::SectorPropagator(const LaserModel& model, int max_offset)
    : dim_(model.dim), max_offset_(std::min(max_offset, model.dim - 1)) {
  if (max_offset < 0) throw ValidationError("max_offset must be nonnegative");
  const Eigen::VectorXd decay = model.decay_diagonal();
  blocks_.reserve(2 * max_offset_ + 1);
  for (int k = -max_offset_; k <= max_offset_; ++k) {
    Chain c = make_chain(model, decay, k);
    Block b;
    b.offset = k;
    const int len = static_cast<int>(c.diag.size());
    b.flat.resize(len);
    for (int i = 0; i < len; ++i) b.flat[i] = flat_index(c.rows[i], c.cols[i], dim_);
    b.scale = c.log_scale.array().exp();
    if (len == 1) {
      b.eigenvalues = c.diag;
      b.eigenvectors = Eigen::MatrixXd::Ones(1, 1);
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(c.diag, c.sym, Eigen::ComputeEigenvectors);
      if (es.info() != Eigen::Success) throw NumericalFailure("tridiagonal eigensolver failed");
      b.eigenvalues = es.eigenvalues();
      b.eigenvectors = es.eigenvectors();
    }
    blocks_.push_back(std::move(b));
  }
}

Eigen::VectorXd SectorPropagator::advance(const Eigen::VectorXd& v, double t) const {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_) * dim_;
  if (v.size() != n) throw ValidationError("SectorPropagator: vector length mismatch");
  for (int col = 0; col < dim_; ++col) {
    for (int row = 0; row < dim_; ++row) {
      if (std::abs(row - col) > max_offset_ && v[flat_index(row, col, dim_)] != 0.0) {
        throw ValidationError("vector has weight at offset " + std::to_string(row - col) +
                              " beyond the propagated range");
      }
    }
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (const Block& b : blocks_) {
    const Eigen::Index len = static_cast<Eigen::Index>(b.flat.size());
    Eigen::VectorXd y(len);
    bool any = false;
    for (Eigen::Index i = 0; i < len; ++i) {
      y[i] = v[b.flat[i]] * b.scale[i];
      any = any || y[i] != 0.0;
    }
    if (!any) continue;
    Eigen::VectorXd c = b.eigenvectors.transpose() * y;
    c.array() *= (b.eigenvalues.array() * t).exp();
    y.noalias() = b.eigenvectors * c;
    for (Eigen::Index i = 0; i < len; ++i) out[b.flat[i]] = y[i] / b.scale[i];
  }
  return out;
}

double SectorPropagator::slowest_eigenvalue(int offset) const {
  if (std::abs(offset) > max_offset_) throw ValidationError("offset outside propagated range");
  return block(offset).eigenvalues.maxCoeff();
}

double tridiagonal_coherence(const LaserModel& model) {
  const Eigen::VectorXd decay = model.decay_diagonal();
  const Chain c = make_chain(model, decay, -1);
  const int len = static_cast<int>(c.diag.size());
  // Symmetric system T z = S r with z = S y.
  Eigen::VectorXd rhs(len);
  for (int i = 0; i < len; ++i) {
    const int n = c.cols[i];
    rhs[i] = model.loss_at(n) * model.steady[n] * std::exp(c.log_scale[i]);
  }
  Eigen::VectorXd diag = c.diag;
  for (int i = 1; i < len; ++i) {
    const double f = c.sym[i - 1] / diag[i - 1];
    diag[i] -= f * c.sym[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  Eigen::VectorXd z(len);
  z[len - 1] = rhs[len - 1] / diag[len - 1];
  for (int i = len - 2; i >= 0; --i) z[i] = (rhs[i] - c.sym[i] * z[i + 1]) / diag[i];

  double sum = 0.0;
  for (int i = 0; i < len; ++i) sum += model.loss_at(c.cols[i]) * z[i] * std::exp(-c.log_scale[i]);
  const double value = -2.0 * sum;
  if (!(value > 0.0)) throw NumericalFailure("nonpositive coherence from tridiagonal solve", value);
  return value;
}

}  // namespace hlaser
