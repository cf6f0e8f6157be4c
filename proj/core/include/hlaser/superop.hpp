#pragma once

#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hlaser/model.hpp"

namespace hlaser {

// Operators on the D-level cavity are flattened by column stacking: entry
// (row, col) of a D x D matrix lives at row + D * col. With this convention
// vec(A X B) = (B^T kron A) vec(X).
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline Eigen::Index flat_index(int row, int col, int dim) {
  return static_cast<Eigen::Index>(row) + static_cast<Eigen::Index>(dim) * col;
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& op);
Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int dim);

// vec(rho_ss): the right fixed vector |1).
Eigen::VectorXd steady_vector(const LaserModel& model);

// (1| v: the trace of the flattened operator.
double flat_trace(const Eigen::VectorXd& v, int dim);

// vec(L X) and vec(X L^T): annihilation and creation jumps of the beam.
Eigen::VectorXd apply_jump_left(const LaserModel& model, const Eigen::VectorXd& v);
Eigen::VectorXd apply_jump_right(const LaserModel& model, const Eigen::VectorXd& v);

enum class SuperopKind { liouvillian, transfer, transfer_generator, projected };

struct FlatSuperoperator {
  int dim = 0;
  SparseRowMatrix matrix;
  SuperopKind kind = SuperopKind::liouvillian;

  Eigen::Index size() const { return matrix.rows(); }
  double max_abs() const;
};

FlatSuperoperator build_liouvillian(const LaserModel& model);

// Oblique rank-one projector Q = I - |1)(1|, never densified.
class ProjectorQ {
 public:
  ProjectorQ(Eigen::VectorXd fixed, int dim);
  explicit ProjectorQ(const LaserModel& model);

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  void apply_in_place(Eigen::VectorXd& v) const;
  const Eigen::VectorXd& fixed() const { return fixed_; }
  int dim() const { return dim_; }

 private:
  Eigen::VectorXd fixed_;
  int dim_;
};

/// Matrix-market export of the sparse superoperator.
void write_matrix_market(const FlatSuperoperator& op, const std::string& path);

// ---------------------------------------------------------------------------
// Matrix exponential actions

struct ExpmOptions {
  int krylov_dim = 30;
  double tol = 1e-12;
  long max_steps = 2'000'000;
};

struct ExpmStats {
  long steps = 0;
  long rejections = 0;
  double error_estimate = 0.0;
};

/// w = exp(t A) v by restarted Arnoldi with adaptive substeps (matvecs only).
/// `tol` bounds the accumulated error relative to the running norm of w.
Eigen::VectorXd expm_action(const FlatSuperoperator& op, const Eigen::VectorXd& v, double t,
                            const ExpmOptions& options = {}, ExpmStats* stats = nullptr);

inline constexpr int kDenseExpmMaxDim = 64;

/// Dense scaling-and-squaring reference; only for dim <= kDenseExpmMaxDim.
Eigen::VectorXd expm_action_dense(const FlatSuperoperator& op, const Eigen::VectorXd& v, double t);

// Anything that advances a flattened operator under the Liouvillian.
class Propagator {
 public:
  virtual ~Propagator() = default;
  virtual Eigen::VectorXd advance(const Eigen::VectorXd& v, double t) const = 0;
};

class KrylovPropagator final : public Propagator {
 public:
  explicit KrylovPropagator(FlatSuperoperator op, ExpmOptions options = {})
      : op_(std::move(op)), options_(options) {}
  Eigen::VectorXd advance(const Eigen::VectorXd& v, double t) const override {
    return expm_action(op_, v, t, options_);
  }
  const FlatSuperoperator& op() const { return op_; }

 private:
  FlatSuperoperator op_;
  ExpmOptions options_;
};

// ---------------------------------------------------------------------------
// Projected solves: (Q A Q) x = Q rhs with (1|x = 0

enum class SolveMethod { automatic, gmres, sparse_lu };

struct SolveOptions {
  SolveMethod method = SolveMethod::automatic;
  double tol = 1e-12;      // relative residual target
  int max_krylov = 0;      // 0 picks a size from the problem dimension
  int max_restarts = 20;
  int max_refinements = 40;
  int gmres_max_dim = 150; // automatic switches to sparse LU above this D
};

struct SolveResult {
  Eigen::VectorXd x;
  double residual = 0.0;   // ||Q A Q x - Q rhs|| / ||Q rhs||
  int iterations = 0;
  SolveMethod method = SolveMethod::gmres;
  double rhs_trace = 0.0;  // (1|rhs before projection
  bool trace_warning = false;
};

SolveResult solve_projected(const FlatSuperoperator& op, const ProjectorQ& q,
                            const Eigen::VectorXd& rhs, const SolveOptions& options = {});

SolveResult solve_projected(const LaserModel& model, const Eigen::VectorXd& rhs,
                            const SolveOptions& options = {});

}  // namespace hlaser
