#pragma once

// Recovery operators R_a = sum_i alpha_ai P_i and the coefficient
// constraints they must satisfy.
//
// For a code basis {e_A} the recovery criterion reduces to the linear system
//   sum_i y_i |<e_A|Psi_i|e_A>|^2 = 1,   y_i = sum_a |alpha_ai|^2 >= 0,
// one equation per code state. Phases of alpha are fixed to zero.

#include <optional>
#include <string>
#include <vector>

#include "cuntzrec/cuntz.hpp"
#include "cuntzrec/wordspace.hpp"

namespace cuntzrec {

struct CodeSpace {
  BasisPtr basis;
  std::vector<StateVector> states;

  std::size_t k() const { return states.size(); }
};

/// Validates orthonormality (Gram = I within `tol`) and that every state is
/// supported on words of length <= L-1.
CodeSpace make_code_space(std::vector<StateVector> states, double tol = tol::kRelation);

double gram_defect(const std::vector<StateVector>& states);

/// entries(A, i-1) = <e_A|Psi_i|e_A>.
struct AmplitudeTable {
  CMatrix entries;

  /// k x d matrix of |Psi_iA|^2.
  Eigen::MatrixXd constraint_matrix() const { return entries.cwiseAbs2(); }
};

AmplitudeTable transition_amplitudes(const GaugeMultiplet& m, const CodeSpace& code);

inline constexpr double kFeasibilityTol = 1e-8;

struct RecoveryPlan {
  int M = 0;
  /// M x d, real and nonnegative.
  Eigen::MatrixXd alpha;
  /// Column sums of |alpha|^2, the quantities the constraints actually see.
  Eigen::VectorXd y;
  std::vector<FieldOperator> operators;
  double residual = 0.0;
};

/// Assembles R_a = sum_i alpha_ai P_i for an arbitrary coefficient matrix.
RecoveryPlan plan_from_alpha(const GaugeMultiplet& m, const Eigen::MatrixXd& alpha,
                             double residual = 0.0);

/// Solves for y >= 0 with C y = 1 and splits y uniformly over M operators.
/// `M = std::nullopt` selects M = k. Throws InfeasibleRecovery.
RecoveryPlan solve_recovery(const GaugeMultiplet& m, const CodeSpace& code,
                            std::optional<int> M = std::nullopt,
                            double feasibility_tol = kFeasibilityTol);

struct StateRecovery {
  double fidelity_before = 0.0;  // <e|rho_F|e>
  double fidelity_after = 0.0;   // <e|rho_R|e>
  double fidelity_closed_form = 0.0;
  double trace_initial = 0.0;
  double trace_error = 0.0;
  double trace_recovered = 0.0;
  bool recovered = false;
  bool closed_form_agrees = false;
};

struct RecoveryReport {
  std::vector<StateRecovery> states;
  double max_fidelity_defect = 0.0;
  double max_closed_form_gap = 0.0;
  bool pass = false;
};

RecoveryReport verify_recovery(const RecoveryPlan& plan, const GaugeMultiplet& m,
                               const CodeSpace& code, double tol = tol::kRelation,
                               bool renormalize_channel = false);

struct GaugeConstraint {
  double value = 0.0;
  double imag = 0.0;
  bool pass = false;
};

/// Antisymmetrized depth-d constraint on the first-slot coefficients:
///   sum_a sum_{q,r} sign(q) sign(r)/d! alpha_{a,q(1)} alpha*_{a,r(1)}
///         <Psi_q(1)...Psi_q(d)> <Psi_r(d)^dag...Psi_r(1)^dag>  = 1.
/// Requires L >= d and phi supported on lengths <= L-d.
GaugeConstraint check_gauge_constraint(const RecoveryPlan& plan, const GaugeMultiplet& m,
                                       const StateVector& phi, double tol = tol::kRelation);

struct BasisTransformReport {
  /// values[B][i]
  std::vector<std::vector<Complex>> per_generator;
  /// values[B] with the moduli summed over i.
  std::vector<Complex> summed;
  double max_defect = 0.0;         // over per_generator
  double max_summed_defect = 0.0;  // informational
  bool pass = false;
};

/// v(B,i) = sum_C |theta_BC|^2 + sum_{C!=D} conj(theta_BC) theta_BD |<f_C|Psi_i|f_D>|.
BasisTransformReport check_basis_transform(const CMatrix& theta, const GaugeMultiplet& m,
                                           const CodeSpace& new_basis,
                                           double tol = tol::kRelation);

}  // namespace cuntzrec
