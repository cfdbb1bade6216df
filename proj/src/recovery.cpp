#include "cuntzrec/recovery.hpp"

#include <cmath>

#include "cuntzrec/channels.hpp"
#include "cuntzrec/errors.hpp"
#include "cuntzrec/nnls.hpp"

namespace cuntzrec {

double gram_defect(const std::vector<StateVector>& states) {
  double worst = 0.0;
  for (std::size_t a = 0; a < states.size(); ++a)
    for (std::size_t b = 0; b < states.size(); ++b) {
      const Complex g = states[a].amplitudes.dot(states[b].amplitudes);
      worst = std::max(worst, std::abs(g - Complex(a == b ? 1.0 : 0.0)));
    }
  return worst;
}

CodeSpace make_code_space(std::vector<StateVector> states, double tol) {
  if (states.empty()) throw ShapeError("code space needs at least one state");
  const BasisPtr basis = states.front().basis;
  for (const auto& s : states) {
    require_same_basis(*basis, *s.basis, "code space");
    if (s.max_support_length() > basis->L() - 1)
      throw DepthBudgetError("code state supported on words of length L=" +
                             std::to_string(basis->L()) + "; code states must stay below the top level");
  }
  const double defect = gram_defect(states);
  if (defect > tol)
    throw NumericalError("code basis is not orthonormal (Gram defect " + std::to_string(defect) + ")");
  return {basis, std::move(states)};
}

AmplitudeTable transition_amplitudes(const GaugeMultiplet& m, const CodeSpace& code) {
  require_same_basis(*m.basis, *code.basis, "transition_amplitudes");
  AmplitudeTable t{CMatrix::Zero(static_cast<Eigen::Index>(code.k()), m.d())};
  for (std::size_t a = 0; a < code.k(); ++a) {
    const CVector& e = code.states[a].amplitudes;
    for (int i = 1; i <= m.d(); ++i)
      t.entries(static_cast<Eigen::Index>(a), i - 1) = e.dot(m.psi(i).matrix * e);
  }
  return t;
}

RecoveryPlan plan_from_alpha(const GaugeMultiplet& m, const Eigen::MatrixXd& alpha,
                             double residual) {
  if (alpha.cols() != m.d())
    throw ShapeError("alpha must have d=" + std::to_string(m.d()) + " columns");
  const auto projectors = build_projectors(m);
  RecoveryPlan plan;
  plan.M = static_cast<int>(alpha.rows());
  plan.alpha = alpha;
  plan.y = alpha.cwiseAbs2().colwise().sum().transpose();
  plan.residual = residual;
  for (Eigen::Index a = 0; a < alpha.rows(); ++a) {
    FieldOperator r = FieldOperator::zero(m.basis);
    for (int i = 0; i < m.d(); ++i) r = r + Complex(alpha(a, i)) * projectors[i];
    plan.operators.push_back(std::move(r));
  }
  return plan;
}

RecoveryPlan solve_recovery(const GaugeMultiplet& m, const CodeSpace& code,
                            std::optional<int> M, double feasibility_tol) {
  const int count = M.value_or(static_cast<int>(code.k()));
  if (count < 1) throw ShapeError("number of recovery operators must be >= 1");

  const Eigen::MatrixXd c = transition_amplitudes(m, code).constraint_matrix();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(c.rows());

  std::vector<int> zero_rows;
  for (Eigen::Index a = 0; a < c.rows(); ++a)
    if (c.row(a).maxCoeff() == 0.0) zero_rows.push_back(static_cast<int>(a));
  if (!zero_rows.empty())
    throw InfeasibleRecovery("code state(s) orthogonal to all of their generator images", zero_rows,
                             std::sqrt(static_cast<double>(zero_rows.size())));

  const auto sol = nnls::min_norm_nonnegative(c, ones, feasibility_tol);
  if (!sol.feasible) {
    const Eigen::VectorXd dev = c * sol.x - ones;
    const double row_tol = feasibility_tol / std::sqrt(static_cast<double>(c.rows()));
    std::vector<int> failing;
    for (Eigen::Index a = 0; a < dev.size(); ++a)
      if (std::abs(dev(a)) > row_tol) failing.push_back(static_cast<int>(a));
    throw InfeasibleRecovery("no nonnegative solution of the recovery constraints (residual " +
                                 std::to_string(sol.residual) + ")",
                             failing, sol.residual);
  }

  const Eigen::VectorXd y = sol.x.cwiseMax(0.0);
  Eigen::MatrixXd alpha(count, m.d());
  for (int a = 0; a < count; ++a) alpha.row(a) = (y / count).cwiseSqrt().transpose();
  RecoveryPlan plan = plan_from_alpha(m, alpha, sol.residual);
  plan.y = y;
  return plan;
}

RecoveryReport verify_recovery(const RecoveryPlan& plan, const GaugeMultiplet& m,
                               const CodeSpace& code, double tol, bool renormalize_channel) {
  require_same_basis(*m.basis, *code.basis, "verify_recovery");
  const AmplitudeTable amps = transition_amplitudes(m, code);
  const Eigen::MatrixXd weights = plan.alpha.cwiseAbs2();

  RecoveryReport report;
  report.pass = true;
  for (std::size_t a = 0; a < code.k(); ++a) {
    const StateVector& e = code.states[a];
    const DensityMatrix rho_i = pure_density(e);
    const DensityMatrix raw_f = apply_error_channel(m, rho_i, false);
    const double scale = (renormalize_channel && raw_f.trace() > 0.0) ? 1.0 / raw_f.trace() : 1.0;
    const DensityMatrix rho_f{raw_f.basis, scale * raw_f.matrix};
    const DensityMatrix rho_r = apply_recovery_channel(plan, rho_f);

    StateRecovery s;
    s.trace_initial = rho_i.trace();
    s.trace_error = rho_f.trace();
    s.trace_recovered = rho_r.trace();
    s.fidelity_before = fidelity(e, rho_f);
    s.fidelity_after = fidelity(e, rho_r);
    double closed = 0.0;
    for (Eigen::Index r = 0; r < weights.rows(); ++r)
      for (int i = 0; i < m.d(); ++i)
        closed += weights(r, i) * std::norm(amps.entries(static_cast<Eigen::Index>(a), i));
    s.fidelity_closed_form = scale * closed;
    s.recovered = std::abs(s.fidelity_after - 1.0) <= tol;
    s.closed_form_agrees = std::abs(s.fidelity_after - s.fidelity_closed_form) <= tol;

    report.max_fidelity_defect = std::max(report.max_fidelity_defect, std::abs(s.fidelity_after - 1.0));
    report.max_closed_form_gap = std::max(report.max_closed_form_gap, std::abs(s.fidelity_after - s.fidelity_closed_form));
    report.pass = report.pass && s.recovered && s.closed_form_agrees;
    report.states.push_back(s);
  }
  return report;
}

GaugeConstraint check_gauge_constraint(const RecoveryPlan& plan, const GaugeMultiplet& m,
                                       const StateVector& phi, double tol) {
  require_same_basis(*m.basis, *phi.basis, "check_gauge_constraint");
  const int d = m.d();
  if (m.L() < d)
    throw DepthBudgetError("depth-" + std::to_string(d) + " products need L >= d");
  if (phi.max_support_length() > m.L() - d)
    throw DepthBudgetError("state supported beyond length L-d=" + std::to_string(m.L() - d) +
                           "; depth-" + std::to_string(d) + " expectations would be truncated");
  if (plan.alpha.cols() != d) throw ShapeError("plan alpha has wrong number of columns");

  // <Psi_q(1)...Psi_q(d)>_phi per permutation; the daggered product in
  // reversed order is its complex conjugate.
  std::vector<std::vector<int>> perms;
  std::vector<int> signs;
  std::vector<Complex> expect;
  for_each_signed_permutation(d, [&](const std::vector<int>& q, int sign) {
    perms.push_back(q);
    signs.push_back(sign);
    expect.push_back(phi.amplitudes.dot(apply_word_product(m, q, phi.amplitudes)));
  });

  double factorial = 1.0;
  for (int k = 2; k <= d; ++k) factorial *= k;

  Complex lhs = 0.0;
  for (Eigen::Index a = 0; a < plan.alpha.rows(); ++a)
    for (std::size_t q = 0; q < perms.size(); ++q)
      for (std::size_t r = 0; r < perms.size(); ++r) {
        const Complex aq = plan.alpha(a, perms[q].front() - 1);
        const Complex ar = plan.alpha(a, perms[r].front() - 1);
        lhs += static_cast<double>(signs[q] * signs[r]) / factorial * aq * std::conj(ar) *
               expect[q] * std::conj(expect[r]);
      }
  return {lhs.real(), lhs.imag(), std::abs(lhs - 1.0) <= tol};
}

BasisTransformReport check_basis_transform(const CMatrix& theta, const GaugeMultiplet& m,
                                           const CodeSpace& new_basis, double tol) {
  const auto count = static_cast<Eigen::Index>(new_basis.k());
  if (theta.rows() != count || theta.cols() != count)
    throw ShapeError("theta must be " + std::to_string(count) + "x" + std::to_string(count));
  require_same_basis(*m.basis, *new_basis.basis, "check_basis_transform");

  // moduli[i](C, D) = |<f_C|Psi_i|f_D>|
  std::vector<Eigen::MatrixXd> moduli;
  for (int i = 1; i <= m.d(); ++i) {
    Eigen::MatrixXd t(count, count);
    for (Eigen::Index c = 0; c < count; ++c)
      for (Eigen::Index e = 0; e < count; ++e)
        t(c, e) = std::abs(new_basis.states[c].amplitudes.dot(
            m.psi(i).matrix * new_basis.states[e].amplitudes));
    moduli.push_back(std::move(t));
  }

  auto evaluate = [&](Eigen::Index b, const Eigen::MatrixXd& mod) {
    Complex v = theta.row(b).cwiseAbs2().sum();
    for (Eigen::Index c = 0; c < count; ++c)
      for (Eigen::Index e = 0; e < count; ++e)
        if (c != e) v += std::conj(theta(b, c)) * theta(b, e) * mod(c, e);
    return v;
  };

  BasisTransformReport report;
  Eigen::MatrixXd summed_moduli = Eigen::MatrixXd::Zero(count, count);
  for (const auto& mod : moduli) summed_moduli += mod;
  for (Eigen::Index b = 0; b < count; ++b) {
    std::vector<Complex> row;
    for (const auto& mod : moduli) {
      row.push_back(evaluate(b, mod));
      report.max_defect = std::max(report.max_defect, std::abs(row.back() - 1.0));
    }
    report.per_generator.push_back(std::move(row));
    report.summed.push_back(evaluate(b, summed_moduli));
    report.max_summed_defect = std::max(report.max_summed_defect, std::abs(report.summed.back() - 1.0));
  }
  report.pass = report.max_defect <= tol;
  return report;
}

}  // namespace cuntzrec
