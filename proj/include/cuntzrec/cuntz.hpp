#pragma once

// Prefix-shift representation of the Cuntz generators on the truncated word
// space, and the objects built from them (projectors, canonical
// endomorphism, antisymmetrized isometry).
//
// Psi_i |w> = |i w> for |w| <= L-1 and 0 on words of length L. On this space
//   Psi_i^dag Psi_j         = delta_ij * Pi_{<=L-1}
//   sum_i Psi_i Psi_i^dag   = I - |Omega><Omega|
// hold as exact matrix identities.

#include <algorithm>
#include <vector>

#include "cuntzrec/wordspace.hpp"

namespace cuntzrec {

/// Dense operator on the word space. `safe_len` is the largest word length
/// (as a column) on which the operator agrees with its untruncated
/// counterpart; a product of p generators has safe_len = L - p.
struct FieldOperator {
  BasisPtr basis;
  CMatrix matrix;
  int safe_len = 0;

  static FieldOperator identity(const BasisPtr& basis);
  static FieldOperator zero(const BasisPtr& basis);

  FieldOperator adjoint() const;
};

FieldOperator operator*(const FieldOperator& a, const FieldOperator& b);
FieldOperator operator+(const FieldOperator& a, const FieldOperator& b);
FieldOperator operator*(Complex s, const FieldOperator& a);

/// Orthogonal projector onto words of length <= max_len.
CMatrix level_projector(const WordBasis& basis, int max_len);

/// Max-norm of (a - b) restricted to columns of words with length <= max_len.
double column_defect(const WordBasis& basis, const CMatrix& a, const CMatrix& b, int max_len);

struct GaugeMultiplet {
  BasisPtr basis;
  std::vector<FieldOperator> generators;

  int d() const { return basis->d(); }
  int L() const { return basis->L(); }
  const FieldOperator& psi(int letter) const { return generators.at(letter - 1); }
};

GaugeMultiplet build_multiplet(const BasisPtr& basis);

struct CuntzDefects {
  /// max |Psi_i^dag Psi_j - delta_ij Pi_{<=L-1}|
  double isometry = 0.0;
  /// max |sum Psi_i Psi_i^dag - (I - |Omega><Omega|)|
  double completeness = 0.0;
  /// Same two relations measured against the untruncated identity.
  double isometry_vs_identity = 0.0;
  double completeness_vs_identity = 0.0;
  bool pass = false;
};

CuntzDefects check_cuntz_relations(const GaugeMultiplet& m, double tol = tol::kRelation);

/// rho(A) = sum_i Psi_i A Psi_i^dag.
FieldOperator canonical_endomorphism(const GaugeMultiplet& m, const FieldOperator& a);

/// P_i = Psi_i Psi_i^dag, the projector onto words starting with letter i.
std::vector<FieldOperator> build_projectors(const GaugeMultiplet& m);

/// Visits the permutations of {1..n} in lexicographic order together with
/// their sign. The sign is updated from the swaps each step performs.
template <class Visitor>
void for_each_signed_permutation(int n, Visitor&& visit) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i + 1;
  int sign = 1;
  while (true) {
    visit(static_cast<const std::vector<int>&>(perm), sign);
    int pivot = n - 2;
    while (pivot >= 0 && perm[pivot] >= perm[pivot + 1]) --pivot;
    if (pivot < 0) return;
    int succ = n - 1;
    while (perm[succ] <= perm[pivot]) --succ;
    std::swap(perm[pivot], perm[succ]);
    sign = -sign;
    // Reversing a suffix of length s is floor(s/2) transpositions.
    const int suffix = n - 1 - pivot;
    if ((suffix / 2) % 2 == 1) sign = -sign;
    std::reverse(perm.begin() + pivot + 1, perm.end());
  }
}

inline constexpr int kMaxIsometryOrder = 6;

/// S = (1/sqrt(d!)) sum_q sign(q) Psi_{q(1)} ... Psi_{q(d)}; safe_len = L - d.
FieldOperator build_isometry_S(const GaugeMultiplet& m, int max_order = kMaxIsometryOrder);

/// Product Psi_{w1} Psi_{w2} ... Psi_{wn} applied to a vector.
CVector apply_word_product(const GaugeMultiplet& m, const std::vector<int>& letters,
                           const CVector& v);

}  // namespace cuntzrec
