#include "cuntzrec/nnls.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace cuntzrec::nnls {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd gather_columns(const MatrixXd& a, const std::vector<Index>& cols) {
  MatrixXd out(a.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = a.col(cols[k]);
  return out;
}

// Least-squares solution restricted to the passive set; zero elsewhere.
VectorXd passive_solve(const MatrixXd& a, const VectorXd& b, const std::vector<bool>& passive) {
  std::vector<Index> cols;
  for (Index j = 0; j < a.cols(); ++j)
    if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
  VectorXd z = VectorXd::Zero(a.cols());
  if (cols.empty()) return z;
  const VectorXd zp = gather_columns(a, cols).completeOrthogonalDecomposition().solve(b);
  for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = zp(static_cast<Index>(k));
  return z;
}

}  // namespace

Result solve(const MatrixXd& a, const VectorXd& b, int max_iter) {
  const Index n = a.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 10);

  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = 10.0 * eps * std::max<double>(1.0, a.cwiseAbs().colwise().sum().maxCoeff()) *
                     static_cast<double>(std::max(a.rows(), n));

  Result res;
  res.x = VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  std::vector<bool> blocked(static_cast<std::size_t>(n), false);

  VectorXd w = a.transpose() * (b - a * res.x);
  while (res.iterations < max_iter) {
    Index best = -1;
    double best_w = tol;
    for (Index j = 0; j < n; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      if (!passive[sj] && !blocked[sj] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) {
      res.converged = true;
      break;
    }
    ++res.iterations;
    passive[static_cast<std::size_t>(best)] = true;

    VectorXd z = passive_solve(a, b, passive);
    if (z(best) <= 0.0) {
      // Column dependent on the passive set up to rounding; exclude it
      // until the passive set changes.
      passive[static_cast<std::size_t>(best)] = false;
      blocked[static_cast<std::size_t>(best)] = true;
      continue;
    }

    while (true) {
      double step = 1.0;
      bool clipped = false;
      for (Index j = 0; j < n; ++j) {
        if (!passive[static_cast<std::size_t>(j)] || z(j) > 0.0) continue;
        const double denom = res.x(j) - z(j);
        if (denom > 0.0) {
          step = std::min(step, res.x(j) / denom);
          clipped = true;
        }
      }
      if (!clipped) break;
      res.x += step * (z - res.x);
      for (Index j = 0; j < n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (passive[sj] && res.x(j) <= tol) {
          passive[sj] = false;
          res.x(j) = 0.0;
        }
      }
      z = passive_solve(a, b, passive);
    }
    res.x = z;
    std::fill(blocked.begin(), blocked.end(), false);
    w = a.transpose() * (b - a * res.x);
  }
  res.residual = (a * res.x - b).norm();
  return res;
}

LdpResult least_distance(const MatrixXd& g, const VectorXd& h) {
  const Index n = g.cols();
  MatrixXd e(n + 1, g.rows());
  e.topRows(n) = g.transpose();
  e.row(n) = h.transpose();
  VectorXd f = VectorXd::Zero(n + 1);
  f(n) = 1.0;

  const Result u = solve(e, f);
  const VectorXd r = e * u.x - f;
  LdpResult out;
  out.x = VectorXd::Zero(n);
  if (r.norm() <= 1e-12 || std::abs(r(n)) <= 1e-14) return out;
  out.x = -r.head(n) / r(n);
  out.feasible = true;
  return out;
}

MinNormResult min_norm_nonnegative(const MatrixXd& a, const VectorXd& b, double tol) {
  const Result base = solve(a, b);
  MinNormResult out{base.x, base.residual, base.residual <= tol};
  if (!out.feasible) return out;

  if (a.completeOrthogonalDecomposition().rank() == a.cols()) return out;

  // Several nonnegative solutions: pick the one of least norm.
  const Index m = a.rows();
  const Index n = a.cols();
  MatrixXd g(2 * m + n, n);
  g << a, -a, MatrixXd::Identity(n, n);
  VectorXd h(2 * m + n);
  h << b, -b, VectorXd::Zero(n);
  const LdpResult ldp = least_distance(g, h);
  if (!ldp.feasible) return out;

  // Re-solve on the LDP support so the equalities hold to rounding.
  const double cutoff = 1e-9 * std::max(1.0, ldp.x.cwiseAbs().maxCoeff());
  std::vector<Index> support;
  for (Index j = 0; j < n; ++j)
    if (ldp.x(j) > cutoff) support.push_back(j);
  VectorXd candidate = VectorXd::Zero(n);
  if (!support.empty()) {
    const VectorXd ys = gather_columns(a, support).completeOrthogonalDecomposition().solve(b);
    for (std::size_t k = 0; k < support.size(); ++k) candidate(support[k]) = ys(static_cast<Index>(k));
  }
  double residual = (a * candidate - b).norm();
  if (candidate.minCoeff() < 0.0 || residual > tol) {
    candidate = ldp.x.cwiseMax(0.0);
    residual = (a * candidate - b).norm();
  }
  if (residual <= tol) {
    out.x = candidate;
    out.residual = residual;
  }
  return out;
}

}  // namespace cuntzrec::nnls
