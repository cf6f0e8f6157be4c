#pragma once

#include <string>

#include <Eigen/Dense>

#include "hlaser/model.hpp"

namespace hlaser {

enum class Precision { automatic, double_precision, extended };

std::string to_string(Precision p);
Precision parse_precision(const std::string& name);

// Largest dimension the double path accepts for each operation.
inline constexpr int kDoubleSolveMaxDim = 12;
inline constexpr int kDoubleDetMaxDim = 14;

/// F v = rhs with F_{nm} = n^{m+1/2}, n, m = 1..D-1.
struct VandermondeSystem {
  int dim = 0;
  Eigen::VectorXd rhs;
  Eigen::VectorXd v;
  double residual = 0.0;  // ||F v - rhs||_inf in the working precision
  double v_norm = 0.0;    // ||v||_inf
  Precision precision = Precision::double_precision;
};

/// Bjorck-Pereyra on F = diag(n^{3/2}) V0 with V0_{nm} = n^{m-1}.
VandermondeSystem solve_vandermonde(int dim, const Eigen::VectorXd& rhs, Precision precision = Precision::automatic);

/// +1 from the pivoted LU of F; throws NumericalFailure otherwise.
int det_positive(int dim, Precision precision = Precision::automatic);

enum class GeneratorKind { gain, loss };

std::string to_string(GeneratorKind k);

struct GeneratorReconstruction {
  GeneratorKind which = GeneratorKind::gain;
  int dim = 0;
  Precision precision = Precision::double_precision;
  Eigen::VectorXd v;
  double v_norm = 0.0;
  Eigen::MatrixXd generator;  // sum_m c_m ((a^dag a)^m a^dag s- - a (a^dag a)^m s+), 2D x 2D
  double residual = 0.0;       // max |generator - target|
  double skew_residual = 0.0;  // max |generator + generator^T|
};

/// Expands the gain generator G s- - G^T s+ (or the loss generator L s+ - L^T s-)
/// in the basis above on cavity kron qubit, qubit index fastest.
GeneratorReconstruction reconstruct_generator(const LaserModel& model, GeneratorKind which,
                                              Precision precision = Precision::automatic);

}  // namespace hlaser
