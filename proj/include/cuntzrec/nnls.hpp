#pragma once

// Lawson-Hanson active-set solvers for small dense problems.

#include <Eigen/Dense>

namespace cuntzrec::nnls {

struct Result {
  Eigen::VectorXd x;
  /// ||A x - b||_2 at the returned point.
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// min ||A x - b||_2 subject to x >= 0.
Result solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter = 0);

struct LdpResult {
  Eigen::VectorXd x;
  bool feasible = false;
};

/// Least distance programming: min ||x||_2 subject to G x >= h, reduced to
/// an NNLS problem on [G^T; h^T].
LdpResult least_distance(const Eigen::MatrixXd& g, const Eigen::VectorXd& h);

/// Minimum-norm x >= 0 with A x = b, or the NNLS point when the system
/// has a unique nonnegative solution. `feasible` tells whether ||Ax-b|| <= tol.
struct MinNormResult {
  Eigen::VectorXd x;
  double residual = 0.0;
  bool feasible = false;
};

MinNormResult min_norm_nonnegative(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                   double tol);

}  // namespace cuntzrec::nnls
