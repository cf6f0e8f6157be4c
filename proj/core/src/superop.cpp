#include "hlaser/superop.hpp"

#include <cmath>
#include <vector>

#include <unsupported/Eigen/SparseExtra>

#include "hlaser/errors.hpp"

namespace hlaser {

Eigen::VectorXd flatten(const Eigen::MatrixXd& op) {
  return Eigen::Map<const Eigen::VectorXd>(op.data(), op.size());
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw ValidationError("flattened vector has wrong length");
  }
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), dim, dim);
}

Eigen::VectorXd steady_vector(const LaserModel& model) {
  const int d = model.dim;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d) * d);
  for (int n = 0; n < d; ++n) v[flat_index(n, n, d)] = model.steady[n];
  return v;
}

double flat_trace(const Eigen::VectorXd& v, int dim) {
  double s = 0.0;
  for (int n = 0; n < dim; ++n) s += v[flat_index(n, n, dim)];
  return s;
}

Eigen::VectorXd apply_jump_left(const LaserModel& model, const Eigen::VectorXd& v) {
  const int d = model.dim;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m + 1 < d; ++m) {
      out[flat_index(m, n, d)] = model.loss[m] * v[flat_index(m + 1, n, d)];
    }
  }
  return out;
}

Eigen::VectorXd apply_jump_right(const LaserModel& model, const Eigen::VectorXd& v) {
  const int d = model.dim;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (int n = 0; n + 1 < d; ++n) {
    const double l = model.loss[n];
    for (int m = 0; m < d; ++m) out[flat_index(m, n, d)] = l * v[flat_index(m, n + 1, d)];
  }
  return out;
}

double FlatSuperoperator::max_abs() const {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < matrix.outerSize(); ++k) {
    for (SparseRowMatrix::InnerIterator it(matrix, k); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

FlatSuperoperator build_liouvillian(const LaserModel& model) {
  const int d = model.dim;
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  const Eigen::VectorXd decay = model.decay_diagonal();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(3 * n));
  for (int col = 0; col < d; ++col) {
    for (int row = 0; row < d; ++row) {
      const Eigen::Index i = flat_index(row, col, d);
      // G X G^T feeds (row, col) from (row-1, col-1).
      if (row >= 1 && col >= 1) {
        triplets.emplace_back(i, flat_index(row - 1, col - 1, d),
                              model.gain_at(row) * model.gain_at(col));
      }
      // L X L^T feeds (row, col) from (row+1, col+1).
      if (row + 1 < d && col + 1 < d) {
        triplets.emplace_back(i, flat_index(row + 1, col + 1, d),
                              model.loss_at(row + 1) * model.loss_at(col + 1));
      }
      triplets.emplace_back(i, i, -0.5 * (decay[row] + decay[col]));
    }
  }
  FlatSuperoperator op;
  op.dim = d;
  op.kind = SuperopKind::liouvillian;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

ProjectorQ::ProjectorQ(Eigen::VectorXd fixed, int dim) : fixed_(std::move(fixed)), dim_(dim) {
  if (fixed_.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw ValidationError("fixed vector has wrong length");
  }
}

ProjectorQ::ProjectorQ(const LaserModel& model) : ProjectorQ(steady_vector(model), model.dim) {}

void ProjectorQ::apply_in_place(Eigen::VectorXd& v) const {
  const double tr = flat_trace(v, dim_);
  v.noalias() -= tr * fixed_;
}

Eigen::VectorXd ProjectorQ::apply(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = v;
  apply_in_place(out);
  return out;
}

void write_matrix_market(const FlatSuperoperator& op, const std::string& path) {
  const Eigen::SparseMatrix<double> colmajor = op.matrix;
  if (!Eigen::saveMarket(colmajor, path)) {
    throw ValidationError("cannot write matrix market file " + path);
  }
}

}  // namespace hlaser
