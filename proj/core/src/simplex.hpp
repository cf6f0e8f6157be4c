#pragma once

#include <functional>

#include <Eigen/Dense>

namespace hlaser::detail {

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  long iterations = 0;
  bool converged = false;
};

// Nelder-Mead (GSL nmsimplex2). Stops when the simplex size falls below
// size_tol or after max_iterations.
SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& start, const Eigen::VectorXd& step,
                               long max_iterations, double size_tol);

}  // namespace hlaser::detail
