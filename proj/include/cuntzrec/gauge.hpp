#pragma once

// Global gauge action. A d x d unitary U rotates the multiplet index; on the
// word space it acts level by level as the tensor power U^{(x)n}.

#include <random>

#include "cuntzrec/cuntz.hpp"
#include "cuntzrec/recovery.hpp"
#include "cuntzrec/wordspace.hpp"

namespace cuntzrec {

inline constexpr double kUnitarityTol = 1e-10;

struct GaugeElement {
  CMatrix U;
  Complex det_U;

  /// Throws NumericalError unless U^dag U = I within `tol`.
  static GaugeElement from_matrix(CMatrix u, double tol = kUnitarityTol);
  int d() const { return static_cast<int>(U.rows()); }
};

/// Haar-random element of U(d), or of SU(d) when `special` is set.
GaugeElement random_unitary(int d, std::mt19937_64& rng, bool special = false);

struct GammaRep {
  BasisPtr basis;
  CMatrix Gamma;
};

GammaRep second_quantize(const GaugeElement& g, const BasisPtr& basis);

/// Psi_i -> Gamma Psi_i Gamma^dag.
GaugeMultiplet gauge_transform_multiplet(const GammaRep& gamma, const GaugeMultiplet& m);

StateVector gauge_transform_state(const GammaRep& gamma, const StateVector& phi);
DensityMatrix gauge_transform_density(const GammaRep& gamma, const DensityMatrix& rho);

struct FidelityInvariance {
  double original = 0.0;
  double transformed = 0.0;
  double difference = 0.0;
  bool pass = false;
};

FidelityInvariance check_fidelity_gauge_invariance(const StateVector& phi, const DensityMatrix& rho,
                                                   const GammaRep& gamma,
                                                   double tol = tol::kRelation);

/// max |C'(A,i) - C(A,i)| between constraint matrices built from
/// (Gamma e_A, Psi') and (e_A, Psi).
double constraint_matrix_gauge_defect(const GaugeMultiplet& m, const CodeSpace& code,
                                      const GammaRep& gamma);

struct SCovariance {
  double defect = 0.0;  // ||S' - det(U) S|| on columns of length <= L-d
  Complex det_U;
  bool pass = false;
};

SCovariance check_S_covariance(const GaugeMultiplet& m, const GaugeElement& g,
                               double tol = tol::kRelation);

}  // namespace cuntzrec
