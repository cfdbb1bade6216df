#include <doctest.h>

#include <random>

#include "cuntzrec/channels.hpp"
#include "cuntzrec/errors.hpp"
#include "cuntzrec/recovery.hpp"
#include "oracles.hpp"

using namespace cuntzrec;

namespace {

StateVector state(const BasisPtr& b, std::initializer_list<const char*> words) {
  std::vector<StateTerm> terms;
  for (const char* w : words) terms.emplace_back(parse_word(w), 1.0);
  return make_state(b, terms, true);
}

CodeSpace k1_code(const BasisPtr& b) { return make_code_space({state(b, {"1", "11"})}); }
CodeSpace k2_code(const BasisPtr& b) {
  return make_code_space({state(b, {"1", "11"}), state(b, {"2", "22"})});
}

}  // namespace

TEST_SUITE("recovery") {

TEST_CASE("code space validation") {
  const auto b = WordBasis::build(2, 3);
  CHECK_THROWS_AS(make_code_space({}), ShapeError);
  CHECK_THROWS_AS(make_code_space({state(b, {"1"}), state(b, {"1", "2"})}), NumericalError);
  CHECK_THROWS_AS(make_code_space({state(b, {"111"})}), DepthBudgetError);
  CHECK_THROWS_AS(make_code_space({state(b, {"1"}), state(WordBasis::build(2, 2), {"2"})}), BasisMismatch);
  CHECK(make_code_space({state(b, {"1"}), state(b, {"2"})}).k() == 2);
}

TEST_CASE("transition amplitudes") {
  const auto b = WordBasis::build(2, 3);
  const auto m = build_multiplet(b);
  const auto t_single = transition_amplitudes(m, make_code_space({state(b, {"1"})}));
  CHECK(oracle::max_abs(t_single.entries) == 0.0);
  CHECK(oracle::max_abs(transition_amplitudes(m, make_code_space({state(b, {""})})).entries) == 0.0);

  // Oracle: <e|Psi_i|e> with string-built shifts.
  const oracle::Space s(2, 3);
  const CVector e = (s.ket("1") + s.ket("11")) / std::sqrt(2.0);
  const Complex ref1 = e.dot(oracle::shift(s, 1) * e);
  const Complex ref2 = e.dot(oracle::shift(s, 2) * e);
  CHECK(std::abs(ref1 - Complex(0.5)) <= 1e-15);
  CHECK(std::abs(ref2) == 0.0);
  const auto t = transition_amplitudes(m, k1_code(b));
  CHECK(std::abs(t.entries(0, 0) - ref1) <= 1e-15);
  CHECK(std::abs(t.entries(0, 1) - ref2) == 0.0);
  CHECK(t.constraint_matrix()(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("worked k=1 scenario") {
  const auto b = WordBasis::build(2, 3);
  const auto m = build_multiplet(b);
  const auto code = k1_code(b);
  const auto plan = solve_recovery(m, code);
  CHECK(plan.M == 1);
  CHECK(plan.residual <= 1e-8);
  CHECK(plan.y(0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(plan.y(1) == 0.0);
  CHECK(plan.alpha(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(plan.alpha(0, 1) == 0.0);
  CHECK(4.0 * 0.25 == 1.0);

  const auto rep = verify_recovery(plan, m, code);
  REQUIRE(rep.states.size() == 1);
  CHECK(rep.pass);
  CHECK(std::abs(rep.states[0].fidelity_after - 1.0) <= 1e-9);
  CHECK(std::abs(rep.states[0].fidelity_closed_form - 1.0) <= 1e-9);
  CHECK(rep.states[0].trace_error == doctest::Approx(2.0));
}

TEST_CASE("worked k=2 scenario") {
  const auto b = WordBasis::build(2, 3);
  const auto m = build_multiplet(b);
  const auto code = k2_code(b);
  const auto plan = solve_recovery(m, code, 2);
  CHECK(plan.M == 2);
  CHECK(plan.y(0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(plan.y(1) == doctest::Approx(4.0).epsilon(1e-12));
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i) CHECK(plan.alpha(a, i) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  const auto rep = verify_recovery(plan, m, code);
  CHECK(rep.pass);
  for (const auto& s : rep.states) CHECK(std::abs(s.fidelity_after - 1.0) <= 1e-9);
  // Auto M picks k.
  CHECK(solve_recovery(m, code).M == 2);
}

TEST_CASE("infeasible systems") {
  const auto b = WordBasis::build(2, 3);
  const auto m = build_multiplet(b);
  try {
    solve_recovery(m, make_code_space({state(b, {""})}));
    FAIL("expected InfeasibleRecovery");
  } catch (const InfeasibleRecovery& e) {
    CHECK(e.failing_equations == std::vector<int>{0});
  }
  // Second state has no overlap with its images.
  try {
    solve_recovery(m, make_code_space({state(b, {"1", "11"}), state(b, {"2"})}));
    FAIL("expected InfeasibleRecovery");
  } catch (const InfeasibleRecovery& e) {
    CHECK(e.failing_equations == std::vector<int>{1});
  }
  CHECK_THROWS_AS(solve_recovery(m, k1_code(b), 0), ShapeError);
}

TEST_CASE("underdetermined systems pick the minimum-norm solution") {
  const auto b = WordBasis::build(2, 3);
  const auto m = build_multiplet(b);
  // <e|Psi_1|e> = <e|Psi_2|e> = 1/3 for e = (|""> + |1> + |2>)/sqrt3.
  const auto e = state(b, {"", "1", "2"});
  const auto code = make_code_space({e});
  const Eigen::MatrixXd c = transition_amplitudes(m, code).constraint_matrix();
  CHECK(c(0, 0) == doctest::Approx(1.0 / 9.0));
  CHECK(c(0, 1) == doctest::Approx(1.0 / 9.0));
  const auto plan = solve_recovery(m, code);
  CHECK(plan.y(0) == doctest::Approx(4.5).epsilon(1e-9));
  CHECK(plan.y(1) == doctest::Approx(4.5).epsilon(1e-9));
  CHECK(verify_recovery(plan, m, code).pass);
}

TEST_CASE("zero plan fails verification") {
  const auto b = WordBasis::build(2, 3);
  const auto m = build_multiplet(b);
  const auto rep = verify_recovery(plan_from_alpha(m, Eigen::MatrixXd::Zero(1, 2)), m, k1_code(b));
  CHECK_FALSE(rep.pass);
  CHECK(rep.states[0].fidelity_after == 0.0);
}

TEST_CASE("R_a Psi_j = alpha_aj Psi_j on safe columns") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int d = 1; d <= 3; ++d) {
    const auto b = WordBasis::build(d, 3);
    const auto m = build_multiplet(b);
    Eigen::MatrixXd alpha(3, d);
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < d; ++i) alpha(a, i) = u(rng);
    const auto plan = plan_from_alpha(m, alpha);
    for (int a = 0; a < 3; ++a)
      for (int j = 1; j <= d; ++j) {
        const CMatrix lhs = plan.operators[a].matrix * m.psi(j).matrix;
        CHECK(column_defect(*b, lhs, alpha(a, j - 1) * m.psi(j).matrix, b->L() - 1) <= 1e-15);
      }
    // Normal operators.
    for (const auto& r : plan.operators)
      CHECK(oracle::max_abs(r.matrix * r.matrix.adjoint() - r.matrix.adjoint() * r.matrix) <= 1e-14);
  }
}

TEST_CASE("closed-form fidelity equals the matrix pipeline for arbitrary plans") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const auto b = WordBasis::build(2, 3);
  const auto m = build_multiplet(b);
  const int safe = static_cast<int>(b->level_offset(3));
  for (int t = 0; t < 40; ++t) {
    StateVector e{b, oracle::random_supported(rng, static_cast<int>(b->dim()), safe), true};
    e.amplitudes.normalize();
    const auto code = make_code_space({e});
    Eigen::MatrixXd alpha(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 2; ++i) alpha(a, i) = u(rng);
    const auto rep = verify_recovery(plan_from_alpha(m, alpha), m, code);
    CHECK(rep.max_closed_form_gap <= 1e-9);

    // Scaling y by c scales each constraint LHS by c.
    const Eigen::MatrixXd c = transition_amplitudes(m, code).constraint_matrix();
    const Eigen::VectorXd y = alpha.cwiseAbs2().colwise().sum().transpose();
    CHECK(std::abs((c * (2.5 * y))(0) - 2.5 * (c * y)(0)) <= 1e-12);
  }
}

TEST_CASE("solver soundness and completeness against the support oracle") {
  std::mt19937_64 rng(37);
  int solved = 0;
  int infeasible = 0;
  for (int d = 1; d <= 3; ++d) {
    const auto b = WordBasis::build(d, 3);
    const auto m = build_multiplet(b);
    const int dim = static_cast<int>(b->dim());
    const int safe = static_cast<int>(b->level_offset(3));
    for (int t = 0; t < 40; ++t) {
      const int k = 1 + t % 2;
      // Random orthonormal code states via QR on safe-supported vectors.
      CMatrix raw(dim, k);
      for (int a = 0; a < k; ++a) raw.col(a) = oracle::random_supported(rng, dim, safe);
      if (t % 5 == 0) {
        // A state with no overlap with its images forces an infeasible row.
        raw.col(0).setZero();
        raw(static_cast<Eigen::Index>(b->index_of({1})), 0) = 1.0;
      }
      Eigen::HouseholderQR<CMatrix> qr(raw);
      const CMatrix q = qr.householderQ() * CMatrix::Identity(dim, k);
      std::vector<StateVector> states;
      for (int a = 0; a < k; ++a) states.push_back({b, q.col(a), true});
      const auto code = make_code_space(states);
      const Eigen::MatrixXd c = transition_amplitudes(m, code).constraint_matrix();
      const auto ref = oracle::enumerate_supports(c, Eigen::VectorXd::Ones(k), 1e-9);
      try {
        const auto plan = solve_recovery(m, code);
        ++solved;
        CHECK(ref.feasible);
        CHECK(((c * plan.y).array() - 1.0).abs().maxCoeff() <= 1e-9);
        CHECK(std::abs(plan.y.norm() - ref.min_norm.norm()) <= 1e-7 * std::max(1.0, ref.min_norm.norm()));
        CHECK(verify_recovery(plan, m, code).pass);
      } catch (const InfeasibleRecovery&) {
        ++infeasible;
        CHECK_FALSE(ref.feasible);
      }
    }
  }
  CHECK(solved > 0);
  CHECK(infeasible > 0);
}

TEST_CASE("gauge constraint") {
  SUBCASE("d=1 reduces to the single-generator constraint") {
    const auto b = WordBasis::build(1, 3);
    const auto m = build_multiplet(b);
    const auto code = make_code_space({state(b, {"1", "11"})});
    const auto plan = solve_recovery(m, code);
    const auto gc = check_gauge_constraint(plan, m, code.states[0]);
    const auto amps = transition_amplitudes(m, code);
    const double eq13 = plan.alpha(0, 0) * plan.alpha(0, 0) * std::norm(amps.entries(0, 0));
    CHECK(std::abs(gc.value - eq13) <= 1e-12);
    CHECK(gc.pass);
    const auto off = check_gauge_constraint(plan_from_alpha(m, Eigen::MatrixXd::Constant(1, 1, 1.0)), m,
                                            code.states[0]);
    CHECK(std::abs(off.value - 0.25) <= 1e-12);
    CHECK_FALSE(off.pass);
  }
  SUBCASE("d=2 worked plan: depth-2 expectations vanish") {
    const auto b = WordBasis::build(2, 4);
    const auto m = build_multiplet(b);
    const auto phi = state(b, {"1", "11"});
    const auto plan = solve_recovery(m, make_code_space({phi}));
    // Oracle: explicit permutation sum with string-built shifts.
    const oracle::Space s(2, 4);
    const CVector v = (s.ket("1") + s.ket("11")) / std::sqrt(2.0);
    const Complex e12 = v.dot(oracle::shift(s, 1) * oracle::shift(s, 2) * v);
    const Complex e21 = v.dot(oracle::shift(s, 2) * oracle::shift(s, 1) * v);
    const Complex lhs = 0.5 * std::norm(plan.alpha(0, 0) * e12 - plan.alpha(0, 1) * e21);
    CHECK(std::abs(lhs) == 0.0);
    const auto gc = check_gauge_constraint(plan, m, phi);
    CHECK(gc.value == 0.0);
    CHECK_FALSE(gc.pass);
  }
  SUBCASE("nonzero depth-2 expectation against the permutation oracle") {
    const auto b = WordBasis::build(2, 5);
    const auto m = build_multiplet(b);
    const auto phi = make_state(b, {{parse_word(""), 1.0}, {parse_word("12"), 0.7}, {parse_word("21"), Complex(0.2, 0.4)}}, true);
    Eigen::MatrixXd alpha(2, 2);
    alpha << 1.3, 0.4, 0.2, 2.0;
    const auto plan = plan_from_alpha(m, alpha);
    const oracle::Space s(2, 5);
    const CVector& v = phi.amplitudes;
    const Complex e12 = v.dot(oracle::shift(s, 1) * oracle::shift(s, 2) * v);
    const Complex e21 = v.dot(oracle::shift(s, 2) * oracle::shift(s, 1) * v);
    double lhs = 0.0;
    for (int a = 0; a < 2; ++a) lhs += 0.5 * std::norm(alpha(a, 0) * e12 - alpha(a, 1) * e21);
    CHECK(lhs > 0.1);
    const auto gc = check_gauge_constraint(plan, m, phi);
    CHECK(std::abs(gc.value - lhs) <= 1e-12);
    CHECK(std::abs(gc.imag) <= 1e-12);
  }
  SUBCASE("zero plan and depth errors") {
    const auto b = WordBasis::build(2, 3);
    const auto m = build_multiplet(b);
    const auto phi = state(b, {"1"});
    CHECK(check_gauge_constraint(plan_from_alpha(m, Eigen::MatrixXd::Zero(1, 2)), m, phi).value == 0.0);
    CHECK_THROWS_AS(check_gauge_constraint(plan_from_alpha(m, Eigen::MatrixXd::Zero(1, 2)), m, state(b, {"11"})),
                    DepthBudgetError);
    const auto b3 = WordBasis::build(3, 2);
    const auto m3 = build_multiplet(b3);
    CHECK_THROWS_AS(check_gauge_constraint(plan_from_alpha(m3, Eigen::MatrixXd::Zero(1, 3)), m3, state(b3, {""})),
                    DepthBudgetError);
  }
}

TEST_CASE("basis transform condition") {
  const auto b = WordBasis::build(2, 3);
  const auto m = build_multiplet(b);
  const auto basis = make_code_space({state(b, {"1"}), state(b, {"2"})});

  const auto ident = check_basis_transform(CMatrix::Identity(2, 2), m, basis);
  CHECK(ident.pass);
  CHECK(ident.max_defect == 0.0);

  CMatrix perm(2, 2);
  perm << 0, 1, 1, 0;
  CHECK(check_basis_transform(perm, m, basis).pass);

  const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
  CMatrix rot(2, 2);
  rot << c, -s, s, c;
  // Oracle: the cross terms use |<f_C|Psi_i|f_D>| which vanish here.
  const oracle::Space sp(2, 3);
  for (int i = 1; i <= 2; ++i)
    CHECK(std::abs(sp.ket("1").dot(oracle::shift(sp, i) * sp.ket("2"))) == 0.0);
  const auto rr = check_basis_transform(rot, m, basis);
  CHECK(rr.pass);
  CHECK(rr.max_defect <= 1e-15);
  REQUIRE(rr.per_generator.size() == 2);
  CHECK(rr.per_generator[0].size() == 2);

  CMatrix scaled = 2.0 * CMatrix::Identity(2, 2);
  CHECK_FALSE(check_basis_transform(scaled, m, basis).pass);
  CHECK_THROWS_AS(check_basis_transform(CMatrix::Identity(3, 3), m, basis), ShapeError);
}

TEST_CASE("basis transform with nonzero cross terms") {
  const auto b = WordBasis::build(2, 3);
  const auto m = build_multiplet(b);
  // f_1 = |1>, f_2 = (|""> + |11>)/sqrt2: <f_2|Psi_1|f_1> = 1/sqrt2.
  const auto basis = make_code_space({state(b, {"1"}), state(b, {"", "11"})});
  CMatrix theta(2, 2);
  theta << 0.6, 0.8, 0.8, -0.6;
  const auto r = check_basis_transform(theta, m, basis);
  const double cross = 2.0 * 0.6 * 0.8 * (1.0 / std::sqrt(2.0));
  CHECK(std::abs(r.per_generator[0][0] - Complex(1.0 + cross)) <= 1e-12);
  CHECK(std::abs(r.per_generator[0][1] - Complex(1.0)) <= 1e-12);
  CHECK(std::abs(r.per_generator[1][0] - Complex(1.0 - cross)) <= 1e-12);
  CHECK(std::abs(r.per_generator[1][1] - Complex(1.0)) <= 1e-12);
  CHECK_FALSE(r.pass);
}

}  // TEST_SUITE
