#include "cuntzrec/cuntz.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>

#include "cuntzrec/errors.hpp"

namespace cuntzrec {

namespace {

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

FieldOperator FieldOperator::identity(const BasisPtr& basis) {
  const auto n = as_index(basis->dim());
  return {basis, CMatrix::Identity(n, n), basis->L()};
}

FieldOperator FieldOperator::zero(const BasisPtr& basis) {
  const auto n = as_index(basis->dim());
  return {basis, CMatrix::Zero(n, n), basis->L()};
}

FieldOperator FieldOperator::adjoint() const {
  // Lowering operators never push a word past the top level.
  return {basis, matrix.adjoint(), basis->L()};
}

FieldOperator operator*(const FieldOperator& a, const FieldOperator& b) {
  require_same_basis(*a.basis, *b.basis, "operator product");
  const int depth_b = a.basis->L() - b.safe_len;
  return {a.basis, a.matrix * b.matrix, std::min(b.safe_len, a.safe_len - depth_b)};
}

FieldOperator operator+(const FieldOperator& a, const FieldOperator& b) {
  require_same_basis(*a.basis, *b.basis, "operator sum");
  return {a.basis, a.matrix + b.matrix, std::min(a.safe_len, b.safe_len)};
}

FieldOperator operator*(Complex s, const FieldOperator& a) {
  return {a.basis, s * a.matrix, a.safe_len};
}

CMatrix level_projector(const WordBasis& basis, int max_len) {
  return basis.level_mask(max_len).cast<Complex>().asDiagonal();
}

double column_defect(const WordBasis& basis, const CMatrix& a, const CMatrix& b, int max_len) {
  double worst = 0.0;
  for (std::size_t c = 0; c < basis.dim(); ++c) {
    if (basis.length_at(c) > max_len) continue;
    const auto col = as_index(c);
    worst = std::max(worst, (a.col(col) - b.col(col)).cwiseAbs().maxCoeff());
  }
  return worst;
}

GaugeMultiplet build_multiplet(const BasisPtr& basis) {
  GaugeMultiplet m{basis, {}};
  const auto n = as_index(basis->dim());
  const std::size_t below_top = basis->level_offset(basis->L());
  for (int letter = 1; letter <= basis->d(); ++letter) {
    CMatrix psi = CMatrix::Zero(n, n);
    for (std::size_t col = 0; col < below_top; ++col)
      psi(as_index(basis->prefixed_index(letter, col)), as_index(col)) = 1.0;
    m.generators.push_back({basis, std::move(psi), basis->L() - 1});
  }
  return m;
}

CuntzDefects check_cuntz_relations(const GaugeMultiplet& m, double tol) {
  const auto n = as_index(m.basis->dim());
  const CMatrix truncated = level_projector(*m.basis, m.L() - 1);
  const CMatrix eye = CMatrix::Identity(n, n);
  CMatrix no_vacuum = eye;
  no_vacuum(0, 0) = 0.0;

  CuntzDefects out;
  CMatrix completeness = CMatrix::Zero(n, n);
  for (int i = 1; i <= m.d(); ++i) {
    const CMatrix& pi = m.psi(i).matrix;
    completeness += pi * pi.adjoint();
    for (int j = 1; j <= m.d(); ++j) {
      const CMatrix gram = pi.adjoint() * m.psi(j).matrix;
      const CMatrix expected = (i == j) ? truncated : CMatrix::Zero(n, n);
      const CMatrix expected_full = (i == j) ? eye : CMatrix::Zero(n, n);
      out.isometry = std::max(out.isometry, (gram - expected).cwiseAbs().maxCoeff());
      out.isometry_vs_identity =
          std::max(out.isometry_vs_identity, (gram - expected_full).cwiseAbs().maxCoeff());
    }
  }
  out.completeness = (completeness - no_vacuum).cwiseAbs().maxCoeff();
  out.completeness_vs_identity = (completeness - eye).cwiseAbs().maxCoeff();
  out.pass = out.isometry <= tol && out.completeness <= tol;
  return out;
}

FieldOperator canonical_endomorphism(const GaugeMultiplet& m, const FieldOperator& a) {
  require_same_basis(*m.basis, *a.basis, "canonical_endomorphism");
  FieldOperator out = FieldOperator::zero(m.basis);
  for (const auto& psi : m.generators) out = out + psi * a * psi.adjoint();
  return out;
}

std::vector<FieldOperator> build_projectors(const GaugeMultiplet& m) {
  std::vector<FieldOperator> projectors;
  projectors.reserve(m.generators.size());
  for (const auto& psi : m.generators) {
    FieldOperator p = psi * psi.adjoint();
    // P_i is exact on every column: it only lowers then raises.
    p.safe_len = m.L();
    projectors.push_back(std::move(p));
  }
  return projectors;
}

FieldOperator build_isometry_S(const GaugeMultiplet& m, int max_order) {
  const int d = m.d();
  if (d > max_order)
    throw DepthBudgetError("isometry S needs d! terms; d=" + std::to_string(d) +
                           " exceeds cap " + std::to_string(max_order));
  if (m.L() < d)
    throw DepthBudgetError("isometry S needs L >= d (L=" + std::to_string(m.L()) +
                           ", d=" + std::to_string(d) + ")");

  double factorial = 1.0;
  for (int k = 2; k <= d; ++k) factorial *= k;

  using Sparse = Eigen::SparseMatrix<Complex>;
  std::vector<Sparse> gens;
  for (const auto& g : m.generators) gens.push_back(g.matrix.sparseView());

  const auto n = as_index(m.basis->dim());
  Sparse sum(n, n);
  for_each_signed_permutation(d, [&](const std::vector<int>& perm, int sign) {
    Sparse term = gens[perm.front() - 1];
    for (std::size_t k = 1; k < perm.size(); ++k) term = Sparse(term * gens[perm[k] - 1]);
    sum += Complex(sign) * term;
  });
  return {m.basis, CMatrix(sum) * Complex(1.0 / std::sqrt(factorial)), m.L() - d};
}

CVector apply_word_product(const GaugeMultiplet& m, const std::vector<int>& letters,
                           const CVector& v) {
  CVector out = v;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) out = m.psi(*it).matrix * out;
  return out;
}

}  // namespace cuntzrec
