#pragma once

// Config-driven scenario runner and report serialization.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuntzrec/wordspace.hpp"

namespace cuntzrec {

inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int {
  kExitPass = 0,
  kExitCheckFailure = 2,
  kExitInfeasible = 3,
  kExitConfigError = 4,
};

struct ScenarioConfig {
  int d = 0;
  int L = 0;
  std::vector<std::vector<StateTerm>> code_basis;
  bool normalize = true;
  std::optional<int> M;  // nullopt = "auto"
  double tolerance = tol::kRelation;
  std::optional<CMatrix> gauge;
  std::optional<CMatrix> theta;
  bool renormalize_channel = false;
  std::size_t dim_cap = kDefaultDimCap;
  std::vector<std::string> checks{"cuntz", "recovery"};
  /// FNV-1a of the raw config bytes.
  std::string hash;
};

/// Throws ConfigError on schema violations.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

std::string fnv1a_hex(std::string_view bytes);

struct CheckResult {
  std::string name;
  bool pass = false;
  double witness = 0.0;
  std::vector<double> values;
  std::string detail;

  bool operator==(const CheckResult&) const = default;
};

struct StateOutcome {
  double fidelity_before = 0.0;
  double fidelity_after = 0.0;
  double fidelity_closed_form = 0.0;
  double trace_initial = 0.0;
  double trace_error = 0.0;
  double trace_recovered = 0.0;

  bool operator==(const StateOutcome&) const = default;
};

struct SolverSection {
  bool feasible = false;
  int M = 0;
  std::vector<double> y;
  std::vector<std::vector<double>> alpha;
  std::vector<std::vector<double>> constraint_matrix;
  double residual = 0.0;
  std::vector<int> failing_equations;
  std::string message;

  bool operator==(const SolverSection&) const = default;
};

struct ScenarioReport {
  int schema_version = kReportSchemaVersion;
  std::string config_hash;
  int d = 0;
  int L = 0;
  std::size_t dim = 0;
  SolverSection solver;
  std::vector<StateOutcome> states;
  std::vector<CheckResult> checks;
  bool all_pass = false;
  int exit_code = kExitPass;
  double elapsed_ms = 0.0;

  bool operator==(const ScenarioReport&) const = default;
};

/// Runs the full pipeline. Throws ConfigError for configs that validate
/// syntactically but describe an impossible scenario.
ScenarioReport run_scenario(const ScenarioConfig& config);

enum class ReportFormat { machine, text };

std::string to_machine(const ScenarioReport& report);
std::string to_text(const ScenarioReport& report);
ScenarioReport parse_report(std::string_view machine);

std::string render(const ScenarioReport& report, ReportFormat format);

/// Writes through a temporary file and renames it into place. "-" writes to stdout.
void emit_report(const ScenarioReport& report, const std::string& path, ReportFormat format);

}  // namespace cuntzrec
