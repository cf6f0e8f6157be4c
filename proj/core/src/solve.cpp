#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

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

struct ProjectedOperator {
  const SparseRowMatrix& a;
  const ProjectorQ& q;
  double norm;

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    Eigen::VectorXd qx = q.apply(x);
    out.noalias() = a * qx;
    q.apply_in_place(out);
  }

  // Normwise backward error of x for Q A Q x = b.
  double backward_error(const Eigen::VectorXd& x, const Eigen::VectorXd& b, Eigen::VectorXd& r) const {
    apply(x, r);
    r = b - r;
    const double denom = norm * x.norm() + b.norm();
    return denom > 0.0 ? r.norm() / denom : 0.0;
  }
};

SolveResult gmres(const ProjectedOperator& op, const Eigen::VectorXd& b, const SolveOptions& opt) {
  const Eigen::Index n = b.size();
  const int dim = op.q.dim();
  const int k_max = static_cast<int>(std::min<Eigen::Index>(
      n, opt.max_krylov > 0 ? opt.max_krylov : std::max(40, 2 * dim + 20)));

  SolveResult res;
  res.method = SolveMethod::gmres;
  res.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return res;

  Eigen::MatrixXd basis(n, k_max + 1);
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(k_max + 1, k_max);
  Eigen::VectorXd cs(k_max), sn(k_max), g(k_max + 1);
  Eigen::VectorXd r(n), w(n);

  double eta = op.backward_error(res.x, b, r);
  double previous = std::numeric_limits<double>::infinity();
  for (int cycle = 0; cycle <= opt.max_restarts; ++cycle) {
    if (eta <= opt.tol) break;
    const double beta = r.norm();
    basis.col(0) = r / beta;
    hess.setZero();
    g.setZero();
    g[0] = beta;
    int used = 0;
    for (int j = 0; j < k_max; ++j) {
      op.apply(basis.col(j), w);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = basis.leftCols(j + 1).transpose() * w;
        hess.col(j).head(j + 1) += c;
        w.noalias() -= basis.leftCols(j + 1) * c;
      }
      const double h = w.norm();
      hess(j + 1, j) = h;
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * hess(i, j) + sn[i] * hess(i + 1, j);
        hess(i + 1, j) = -sn[i] * hess(i, j) + cs[i] * hess(i + 1, j);
        hess(i, j) = t;
      }
      const double rr = std::hypot(hess(j, j), hess(j + 1, j));
      cs[j] = hess(j, j) / rr;
      sn[j] = hess(j + 1, j) / rr;
      hess(j, j) = rr;
      hess(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      used = j + 1;
      ++res.iterations;
      if (std::abs(g[j + 1]) <= 0.1 * opt.tol * bnorm || h == 0.0) break;
      basis.col(j + 1) = w / h;
    }
    const Eigen::VectorXd y =
        hess.topLeftCorner(used, used).triangularView<Eigen::Upper>().solve(g.head(used));
    res.x.noalias() += basis.leftCols(used) * y;
    eta = op.backward_error(res.x, b, r);
    if (eta > 0.5 * previous) break;  // stagnation
    previous = eta;
  }
  op.q.apply_in_place(res.x);
  res.residual = op.backward_error(res.x, b, r);
  return res;
}

SolveResult sparse_lu(const ProjectedOperator& op, const Eigen::VectorXd& b, const SolveOptions& opt) {
  const Eigen::Index n = b.size();
  SolveResult res;
  res.method = SolveMethod::sparse_lu;
  res.x = Eigen::VectorXd::Zero(n);
  if (b.norm() == 0.0) return res;

  double max_entry = 0.0;
  for (Eigen::Index k = 0; k < op.a.outerSize(); ++k) {
    for (SparseRowMatrix::InnerIterator it(op.a, k); it; ++it) {
      max_entry = std::max(max_entry, std::abs(it.value()));
    }
  }
  const double shift = 1e-12 * max_entry;
  Eigen::SparseMatrix<double> shifted = op.a;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  shifted.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) {
    throw NumericalFailure("sparse LU factorization failed: " + lu.lastErrorMessage());
  }

  Eigen::VectorXd r(n);
  Eigen::VectorXd dx = lu.solve(b);
  op.q.apply_in_place(dx);
  res.x = dx;
  double eta = op.backward_error(res.x, b, r);
  // Keep refining past the backward-error target until the correction itself
  // is negligible: the forward error lags by the condition number.
  double previous_step = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opt.max_refinements; ++k) {
    dx = lu.solve(r);
    op.q.apply_in_place(dx);
    res.x += dx;
    ++res.iterations;
    eta = op.backward_error(res.x, b, r);
    const double step = dx.norm() / res.x.norm();
    if (eta <= 0.01 * opt.tol && step <= 1e-15) break;
    if (step > 0.5 * previous_step) break;
    previous_step = step;
  }
  res.residual = eta;
  return res;
}

}  // namespace

SolveResult solve_projected(const FlatSuperoperator& op, const ProjectorQ& q, const Eigen::VectorXd& rhs,
                            const SolveOptions& options) {
  if (rhs.size() != op.size()) throw ValidationError("solve_projected: rhs length mismatch");
  if (!(options.tol > 0.0)) throw ValidationError("solve_projected: tol must be positive");

  const double trace = flat_trace(rhs, q.dim());
  Eigen::VectorXd b = q.apply(rhs);
  const ProjectedOperator pop{op.matrix, q, infinity_norm(op.matrix)};

  SolveMethod method = options.method;
  if (method == SolveMethod::automatic) {
    method = op.dim <= options.gmres_max_dim ? SolveMethod::gmres : SolveMethod::sparse_lu;
  }

  SolveResult res;
  if (method == SolveMethod::gmres) {
    res = gmres(pop, b, options);
    if (res.residual > options.tol && options.method == SolveMethod::automatic) {
      res = sparse_lu(pop, b, options);
    }
  } else {
    res = sparse_lu(pop, b, options);
  }
  res.rhs_trace = trace;
  res.trace_warning = std::abs(trace) > options.tol * std::max(1.0, rhs.norm());
  if (!(res.residual <= options.tol)) {
    throw NumericalFailure("projected solve did not converge (backward error " +
                               std::to_string(res.residual) + ")",
                           res.residual);
  }
  return res;
}

SolveResult solve_projected(const LaserModel& model, const Eigen::VectorXd& rhs, const SolveOptions& options) {
  return solve_projected(build_liouvillian(model), ProjectorQ(model), rhs, options);
}

}  // namespace hlaser
