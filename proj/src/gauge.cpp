#include "cuntzrec/gauge.hpp"

#include <cmath>

#include "cuntzrec/errors.hpp"

namespace cuntzrec {

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Gamma is block diagonal over word lengths, so Gamma A Gamma^dag is assembled
// level block by level block, skipping blocks of A that are exactly zero.
CMatrix conjugate_by_levels(const GammaRep& gamma, const CMatrix& a) {
  const WordBasis& b = *gamma.basis;
  CMatrix out = CMatrix::Zero(a.rows(), a.cols());
  for (int r = 0; r <= b.L(); ++r)
    for (int c = 0; c <= b.L(); ++c) {
      const auto ro = static_cast<Eigen::Index>(b.level_offset(r));
      const auto co = static_cast<Eigen::Index>(b.level_offset(c));
      const auto rn = static_cast<Eigen::Index>(b.level_size(r));
      const auto cn = static_cast<Eigen::Index>(b.level_size(c));
      const auto blk = a.block(ro, co, rn, cn);
      if ((blk.array() == Complex(0.0)).all()) continue;
      out.block(ro, co, rn, cn).noalias() =
          gamma.Gamma.block(ro, ro, rn, rn) * blk * gamma.Gamma.block(co, co, cn, cn).adjoint();
    }
  return out;
}

}  // namespace

GaugeElement GaugeElement::from_matrix(CMatrix u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) throw ShapeError("gauge element must be square");
  const double defect =
      (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (defect > tol)
    throw NumericalError("gauge element is not unitary (defect " + std::to_string(defect) + ")");
  const Complex det = u.determinant();
  return {std::move(u), det};
}

GaugeElement random_unitary(int d, std::mt19937_64& rng, bool special) {
  std::normal_distribution<double> normal;
  CMatrix z(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the column phases so the distribution is Haar.
  for (Eigen::Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    if (std::abs(rjj) > 0.0) q.col(j) *= rjj / std::abs(rjj);
  }
  if (special) {
    const Complex det = q.determinant();
    q /= std::pow(det, 1.0 / d);
  }
  return GaugeElement::from_matrix(std::move(q), 1e-9);
}

GammaRep second_quantize(const GaugeElement& g, const BasisPtr& basis) {
  if (g.d() != basis->d())
    throw ShapeError("gauge element acts on " + std::to_string(g.d()) +
                     " letters, basis has d=" + std::to_string(basis->d()));
  const auto n = static_cast<Eigen::Index>(basis->dim());
  CMatrix gamma = CMatrix::Zero(n, n);
  CMatrix block = CMatrix::Identity(1, 1);
  for (int level = 0; level <= basis->L(); ++level) {
    const auto off = static_cast<Eigen::Index>(basis->level_offset(level));
    gamma.block(off, off, block.rows(), block.cols()) = block;
    if (level < basis->L()) block = kron(g.U, block);
  }
  return {basis, std::move(gamma)};
}

GaugeMultiplet gauge_transform_multiplet(const GammaRep& gamma, const GaugeMultiplet& m) {
  require_same_basis(*gamma.basis, *m.basis, "gauge_transform_multiplet");
  GaugeMultiplet out{m.basis, {}};
  for (const auto& psi : m.generators)
    out.generators.push_back({m.basis, conjugate_by_levels(gamma, psi.matrix), psi.safe_len});
  return out;
}

StateVector gauge_transform_state(const GammaRep& gamma, const StateVector& phi) {
  require_same_basis(*gamma.basis, *phi.basis, "gauge_transform_state");
  return {phi.basis, gamma.Gamma * phi.amplitudes, phi.normalized};
}

DensityMatrix gauge_transform_density(const GammaRep& gamma, const DensityMatrix& rho) {
  require_same_basis(*gamma.basis, *rho.basis, "gauge_transform_density");
  return {rho.basis, conjugate_by_levels(gamma, rho.matrix)};
}

FidelityInvariance check_fidelity_gauge_invariance(const StateVector& phi, const DensityMatrix& rho,
                                                   const GammaRep& gamma, double tol) {
  FidelityInvariance out;
  out.original = fidelity(phi, rho);
  out.transformed = fidelity(gauge_transform_state(gamma, phi), gauge_transform_density(gamma, rho));
  out.difference = std::abs(out.transformed - out.original);
  out.pass = out.difference <= tol;
  return out;
}

double constraint_matrix_gauge_defect(const GaugeMultiplet& m, const CodeSpace& code,
                                      const GammaRep& gamma) {
  const GaugeMultiplet moved = gauge_transform_multiplet(gamma, m);
  CodeSpace moved_code{code.basis, {}};
  for (const auto& e : code.states) moved_code.states.push_back(gauge_transform_state(gamma, e));
  const Eigen::MatrixXd before = transition_amplitudes(m, code).constraint_matrix();
  const Eigen::MatrixXd after = transition_amplitudes(moved, moved_code).constraint_matrix();
  return (after - before).cwiseAbs().maxCoeff();
}

SCovariance check_S_covariance(const GaugeMultiplet& m, const GaugeElement& g, double tol) {
  const FieldOperator s = build_isometry_S(m);
  const GaugeMultiplet moved = gauge_transform_multiplet(second_quantize(g, m.basis), m);
  const FieldOperator s_moved = build_isometry_S(moved);
  SCovariance out;
  out.det_U = g.det_U;
  out.defect = column_defect(*m.basis, s_moved.matrix, g.det_U * s.matrix, m.L() - m.d());
  out.pass = out.defect <= tol;
  return out;
}

}  // namespace cuntzrec
