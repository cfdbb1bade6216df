#include "cuntzrec/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cuntzrec/channels.hpp"
#include "cuntzrec/cuntz.hpp"
#include "cuntzrec/errors.hpp"
#include "cuntzrec/gauge.hpp"
#include "cuntzrec/recovery.hpp"

namespace cuntzrec {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownChecks{"cuntz",       "recovery", "gauge_fidelity",
                                         "S_covariance", "constr3",  "transfmatr"};

const std::set<std::string> kConfigKeys{"d",      "L",          "code_basis",          "normalize",
                                        "M",      "tolerance",  "gauge",               "theta",
                                        "checks", "dim_cap",    "renormalize_channel", "schema_version"};

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(where + ": complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

CMatrix parse_complex_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError(where + ": ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = parse_complex(row[static_cast<std::size_t>(c)], where);
  }
  return m;
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key '") + key + "' has the wrong type");
  }
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::vector<double>> to_std(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(m(r, c));
  return out;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

ScenarioConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kConfigKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");

  ScenarioConfig cfg;
  cfg.hash = fnv1a_hex(text);
  if (j.contains("schema_version") && j["schema_version"] != kReportSchemaVersion)
    throw ConfigError("unsupported schema_version");
  cfg.d = require<int>(j, "d");
  cfg.L = require<int>(j, "L");
  if (cfg.d < 1 || cfg.L < 1) throw ConfigError("d and L must be >= 1");
  if (cfg.d > 9) throw ConfigError("words are written as digits, so d <= 9");

  const json& code = j.contains("code_basis") ? j["code_basis"] : json();
  if (!code.is_array() || code.empty()) throw ConfigError("code_basis must be a non-empty array of states");
  for (const auto& state : code) {
    if (!state.is_array()) throw ConfigError("each code state is an array of [word, [re, im]] terms");
    std::vector<StateTerm> terms;
    for (const auto& term : state) {
      if (!term.is_array() || term.size() != 2 || !term[0].is_string())
        throw ConfigError("each term is [word, [re, im]]");
      try {
        terms.emplace_back(parse_word(term[0].get<std::string>()), parse_complex(term[1], "code_basis"));
      } catch (const WordError& e) {
        throw ConfigError(std::string("code_basis: ") + e.what());
      }
    }
    cfg.code_basis.push_back(std::move(terms));
  }

  if (j.contains("normalize")) cfg.normalize = require<bool>(j, "normalize");
  if (j.contains("M")) {
    const json& m = j["M"];
    if (m.is_string() && m.get<std::string>() == "auto") {
      cfg.M.reset();
    } else if (m.is_number_integer() && m.get<int>() >= 1) {
      cfg.M = m.get<int>();
    } else {
      throw ConfigError("M must be a positive integer or \"auto\"");
    }
  }
  if (j.contains("tolerance")) {
    cfg.tolerance = require<double>(j, "tolerance");
    if (!(cfg.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  }
  if (j.contains("gauge")) cfg.gauge = parse_complex_matrix(j["gauge"], "gauge");
  if (j.contains("theta")) cfg.theta = parse_complex_matrix(j["theta"], "theta");
  if (j.contains("renormalize_channel")) cfg.renormalize_channel = require<bool>(j, "renormalize_channel");
  if (j.contains("dim_cap")) cfg.dim_cap = require<std::size_t>(j, "dim_cap");
  if (j.contains("checks")) {
    cfg.checks = require<std::vector<std::string>>(j, "checks");
    std::set<std::string> seen;
    for (const auto& c : cfg.checks) {
      if (!kKnownChecks.count(c)) throw ConfigError("unknown check '" + c + "'");
      if (!seen.insert(c).second) throw ConfigError("check '" + c + "' listed twice");
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  auto wants = [&](const char* name) {
    return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
  };

  BasisPtr basis;
  try {
    basis = WordBasis::build(cfg.d, cfg.L, cfg.dim_cap);
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  }

  CodeSpace code;
  try {
    std::vector<StateVector> states;
    for (const auto& terms : cfg.code_basis) states.push_back(make_state(basis, terms, cfg.normalize));
    code = make_code_space(std::move(states), cfg.tolerance);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("code_basis: ") + e.what());
  }

  std::optional<GaugeElement> gauge;
  if (wants("gauge_fidelity") || wants("S_covariance")) {
    if (!cfg.gauge) throw ConfigError("gauge checks requested but no 'gauge' matrix given");
    if (cfg.gauge->rows() != cfg.d) throw ConfigError("gauge matrix must be d x d");
  }
  if (cfg.gauge) {
    try {
      gauge = GaugeElement::from_matrix(*cfg.gauge);
    } catch (const Error& e) {
      throw ConfigError(std::string("gauge: ") + e.what());
    }
  }
  if (wants("transfmatr")) {
    if (!cfg.theta) throw ConfigError("transfmatr requested but no 'theta' matrix given");
    const auto k = static_cast<Eigen::Index>(code.k());
    if (cfg.theta->rows() != k || cfg.theta->cols() != k)
      throw ConfigError("theta must be k x k with k the number of code states");
  }

  const GaugeMultiplet m = build_multiplet(basis);
  ScenarioReport report;
  report.config_hash = cfg.hash;
  report.d = cfg.d;
  report.L = cfg.L;
  report.dim = basis->dim();

  const Eigen::MatrixXd c = transition_amplitudes(m, code).constraint_matrix();
  report.solver.constraint_matrix = to_std(c);
  report.solver.M = cfg.M.value_or(static_cast<int>(code.k()));

  std::optional<RecoveryPlan> plan;
  try {
    plan = solve_recovery(m, code, cfg.M);
    report.solver.feasible = true;
    report.solver.y = to_std(plan->y);
    report.solver.alpha = to_std(plan->alpha);
    report.solver.residual = plan->residual;
    if (plan->M > 1) report.solver.message = "constraints see only column sums of alpha^2; one operator suffices";
  } catch (const InfeasibleRecovery& e) {
    report.solver.feasible = false;
    report.solver.residual = e.residual;
    report.solver.failing_equations = e.failing_equations;
    report.solver.message = e.what();
  }

  auto no_plan = [&](const std::string& name) {
    report.checks.push_back({name, false, report.solver.residual, {}, "no recovery plan: solve infeasible"});
  };

  for (const auto& name : cfg.checks) {
    if (name == "cuntz") {
      const CuntzDefects def = check_cuntz_relations(m, cfg.tolerance);
      report.checks.push_back({name, def.pass, std::max(def.isometry, def.completeness),
                               {def.isometry, def.completeness, def.isometry_vs_identity,
                                def.completeness_vs_identity},
                               "isometry, completeness, isometry_vs_identity, completeness_vs_identity"});
    } else if (name == "recovery") {
      if (!plan) {
        no_plan(name);
        continue;
      }
      const RecoveryReport rr = verify_recovery(*plan, m, code, cfg.tolerance, cfg.renormalize_channel);
      for (const auto& s : rr.states)
        report.states.push_back({s.fidelity_before, s.fidelity_after, s.fidelity_closed_form,
                                 s.trace_initial, s.trace_error, s.trace_recovered});
      report.checks.push_back({name, rr.pass, std::max(rr.max_fidelity_defect, rr.max_closed_form_gap),
                               {rr.max_fidelity_defect, rr.max_closed_form_gap},
                               "max |F-1|, max |F_matrix - F_closed_form|"});
    } else if (name == "gauge_fidelity") {
      const GammaRep gamma = second_quantize(*gauge, basis);
      double worst = 0.0;
      for (const auto& e : code.states) {
        DensityMatrix rho = apply_error_channel(m, pure_density(e), cfg.renormalize_channel);
        if (plan) rho = apply_recovery_channel(*plan, rho);
        worst = std::max(worst, check_fidelity_gauge_invariance(e, rho, gamma, cfg.tolerance).difference);
      }
      const double constraint = constraint_matrix_gauge_defect(m, code, gamma);
      report.checks.push_back({name, worst <= cfg.tolerance && constraint <= cfg.tolerance,
                               std::max(worst, constraint), {worst, constraint},
                               "max fidelity difference, max constraint-matrix difference"});
    } else if (name == "S_covariance") {
      try {
        const SCovariance cov = check_S_covariance(m, *gauge, cfg.tolerance);
        report.checks.push_back({name, cov.pass, cov.defect, {cov.det_U.real(), cov.det_U.imag()},
                                 "||S' - det(U) S|| on safe columns; values = det(U)"});
      } catch (const DepthBudgetError& e) {
        report.checks.push_back({name, false, 0.0, {}, e.what()});
      }
    } else if (name == "constr3") {
      if (!plan) {
        no_plan(name);
        continue;
      }
      CheckResult r{name, true, 0.0, {}, "per-state constraint values"};
      try {
        for (const auto& e : code.states) {
          const GaugeConstraint gc = check_gauge_constraint(*plan, m, e, cfg.tolerance);
          r.values.push_back(gc.value);
          r.witness = std::max(r.witness, std::abs(gc.value - 1.0));
          r.pass = r.pass && gc.pass;
        }
      } catch (const DepthBudgetError& ex) {
        r.pass = false;
        r.values.clear();
        r.witness = 0.0;
        r.detail = ex.what();
      }
      report.checks.push_back(std::move(r));
    } else if (name == "transfmatr") {
      const BasisTransformReport bt = check_basis_transform(*cfg.theta, m, code, cfg.tolerance);
      report.checks.push_back({name, bt.pass, bt.max_defect, {bt.max_defect, bt.max_summed_defect},
                               "per-generator max |v-1|, generator-summed max |v-1|"});
    }
  }

  report.all_pass = report.solver.feasible;
  for (const auto& c : report.checks) report.all_pass = report.all_pass && c.pass;
  if (!report.solver.feasible)
    report.exit_code = kExitInfeasible;
  else
    report.exit_code = report.all_pass ? kExitPass : kExitCheckFailure;

  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string to_machine(const ScenarioReport& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["config_hash"] = r.config_hash;
  j["scenario"] = {{"d", r.d}, {"L", r.L}, {"dim", r.dim}};
  j["solver"] = {{"feasible", r.solver.feasible},
                 {"M", r.solver.M},
                 {"y", r.solver.y},
                 {"alpha", r.solver.alpha},
                 {"constraint_matrix", r.solver.constraint_matrix},
                 {"residual", r.solver.residual},
                 {"failing_equations", r.solver.failing_equations},
                 {"message", r.solver.message}};
  json states = json::array();
  for (const auto& s : r.states)
    states.push_back({{"fidelity_before", s.fidelity_before},
                      {"fidelity_after", s.fidelity_after},
                      {"fidelity_closed_form", s.fidelity_closed_form},
                      {"trace_initial", s.trace_initial},
                      {"trace_error", s.trace_error},
                      {"trace_recovered", s.trace_recovered}});
  j["states"] = states;
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"witness", c.witness},
                      {"values", c.values},
                      {"detail", c.detail}});
  j["checks"] = checks;
  j["all_pass"] = r.all_pass;
  j["exit_code"] = r.exit_code;
  j["timing"] = {{"elapsed_ms", r.elapsed_ms}};
  return j.dump(2) + "\n";
}

ScenarioReport parse_report(std::string_view machine) {
  const json j = json::parse(machine);
  ScenarioReport r;
  r.schema_version = j.at("schema_version").get<int>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.d = j.at("scenario").at("d").get<int>();
  r.L = j.at("scenario").at("L").get<int>();
  r.dim = j.at("scenario").at("dim").get<std::size_t>();
  const json& s = j.at("solver");
  r.solver.feasible = s.at("feasible").get<bool>();
  r.solver.M = s.at("M").get<int>();
  r.solver.y = s.at("y").get<std::vector<double>>();
  r.solver.alpha = s.at("alpha").get<std::vector<std::vector<double>>>();
  r.solver.constraint_matrix = s.at("constraint_matrix").get<std::vector<std::vector<double>>>();
  r.solver.residual = s.at("residual").get<double>();
  r.solver.failing_equations = s.at("failing_equations").get<std::vector<int>>();
  r.solver.message = s.at("message").get<std::string>();
  for (const auto& st : j.at("states"))
    r.states.push_back({st.at("fidelity_before").get<double>(), st.at("fidelity_after").get<double>(),
                        st.at("fidelity_closed_form").get<double>(), st.at("trace_initial").get<double>(),
                        st.at("trace_error").get<double>(), st.at("trace_recovered").get<double>()});
  for (const auto& c : j.at("checks"))
    r.checks.push_back({c.at("name").get<std::string>(), c.at("pass").get<bool>(),
                        c.at("witness").get<double>(), c.at("values").get<std::vector<double>>(),
                        c.at("detail").get<std::string>()});
  r.all_pass = j.at("all_pass").get<bool>();
  r.exit_code = j.at("exit_code").get<int>();
  r.elapsed_ms = j.at("timing").at("elapsed_ms").get<double>();
  return r;
}

std::string to_text(const ScenarioReport& r) {
  std::ostringstream os;
  os << std::left;
  os << "scenario   d=" << r.d << " L=" << r.L << " dim=" << r.dim << " config=" << r.config_hash
     << "\n";
  os << "solver     " << (r.solver.feasible ? "feasible" : "INFEASIBLE") << " M=" << r.solver.M
     << std::scientific << std::setprecision(3) << " residual=" << r.solver.residual << "\n";
  os << std::defaultfloat << std::setprecision(10);
  if (r.solver.feasible) {
    os << "  y        =";
    for (double v : r.solver.y) os << ' ' << v;
    os << "\n";
    for (std::size_t a = 0; a < r.solver.alpha.size(); ++a) {
      os << "  alpha[" << a + 1 << "] =";
      for (double v : r.solver.alpha[a]) os << ' ' << v;
      os << "\n";
    }
  } else {
    os << "  failing equations:";
    for (int e : r.solver.failing_equations) os << ' ' << e + 1;
    os << "\n";
  }
  if (!r.states.empty()) {
    os << std::setw(7) << "state" << std::setw(16) << "F_before" << std::setw(16) << "F_after"
       << std::setw(16) << "F_closed" << std::setw(12) << "tr_I" << std::setw(12) << "tr_F"
       << std::setw(12) << "tr_R" << "\n";
    os << std::fixed << std::setprecision(10);
    for (std::size_t a = 0; a < r.states.size(); ++a) {
      const auto& s = r.states[a];
      os << std::setw(7) << a + 1 << std::setw(16) << s.fidelity_before << std::setw(16)
         << s.fidelity_after << std::setw(16) << s.fidelity_closed_form << std::setprecision(6)
         << std::setw(12) << s.trace_initial << std::setw(12) << s.trace_error << std::setw(12)
         << s.trace_recovered << std::setprecision(10) << "\n";
    }
  }
  os << std::scientific << std::setprecision(3);
  for (const auto& c : r.checks)
    os << "check      " << std::setw(16) << c.name << std::setw(6) << (c.pass ? "PASS" : "FAIL")
       << " witness=" << c.witness << "\n";
  os << "overall    " << (r.all_pass ? "PASS" : "FAIL") << " exit=" << r.exit_code << "\n";

  // Left-aligned columns pad the last field; strip that.
  std::istringstream lines(os.str());
  std::string out, line;
  while (std::getline(lines, line)) {
    line.erase(line.find_last_not_of(' ') + 1);
    out += line + '\n';
  }
  return out;
}

std::string render(const ScenarioReport& report, ReportFormat format) {
  return format == ReportFormat::machine ? to_machine(report) : to_text(report);
}

void emit_report(const ScenarioReport& report, const std::string& path, ReportFormat format) {
  const std::string body = render(report, format);
  if (path == "-") {
    std::cout << body << std::flush;
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write report to " + tmp.string());
    out << body;
    if (!out.flush()) throw Error("failed writing report to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error("cannot move report into " + target.string() + ": " + ec.message());
}

}  // namespace cuntzrec
