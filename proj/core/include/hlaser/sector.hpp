#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hlaser/model.hpp"
#include "hlaser/superop.hpp"

namespace hlaser {

// The Liouvillian maps entry (m, n) only to (m +- 1, n +- 1), so it splits
// into independent blocks labelled by the offset k = m - n. Each block is a
// tridiagonal chain of length D - |k| with positive off-diagonal products and
// is therefore similar to a symmetric matrix with a real spectrum.
//
// SectorPropagator diagonalizes the blocks once and then applies exp(t L)
// exactly for any t, which is what long correlation times need.
class SectorPropagator final : public Propagator {
 public:
  SectorPropagator(const LaserModel& model, int max_offset = 2);

  Eigen::VectorXd advance(const Eigen::VectorXd& v, double t) const override;

  int max_offset() const { return max_offset_; }

  // Largest (least negative) eigenvalue of the block at the given offset.
  double slowest_eigenvalue(int offset) const;

 private:
  struct Block {
    int offset = 0;
    std::vector<Eigen::Index> flat;  // flattened indices along the chain
    Eigen::VectorXd scale;           // similarity transform to symmetric form
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
  };

  const Block& block(int offset) const { return blocks_[offset + max_offset_]; }

  int dim_;
  int max_offset_;
  std::vector<Block> blocks_;
};

/// Coherence from the offset -1 block alone: a tridiagonal solve in O(D).
double tridiagonal_coherence(const LaserModel& model);

}  // namespace hlaser
