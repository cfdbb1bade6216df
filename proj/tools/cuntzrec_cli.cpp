// cuntzrec: run recovery scenarios and algebra checks from the command line.
//
//   cuntzrec run --config scenario.json --out report.json [--format machine|text]
//   cuntzrec check-algebra --d 2 --L 3
//   cuntzrec batch --dir configs/ [--out-dir reports/] [--format machine|text]

#include <algorithm>
#include <filesystem>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cuntzrec/cuntz.hpp"
#include "cuntzrec/errors.hpp"
#include "cuntzrec/scenario.hpp"

namespace fs = std::filesystem;
using namespace cuntzrec;

namespace {

int run_one(const fs::path& config, const std::string& out, ReportFormat format, bool verbose) {
  try {
    const ScenarioReport report = run_scenario(load_config(config));
    emit_report(report, out, format);
    if (verbose)
      std::cerr << config.string() << ": " << (report.all_pass ? "PASS" : "FAIL") << " (exit "
                << report.exit_code << ")\n";
    return report.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << config.string() << ": config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    std::cerr << config.string() << ": " << e.what() << "\n";
    return kExitConfigError;
  }
}

int check_algebra(int d, int L, double tolerance) {
  try {
    const GaugeMultiplet m = build_multiplet(WordBasis::build(d, L));
    const CuntzDefects def = check_cuntz_relations(m, tolerance);
    std::cout << std::left << "word space d=" << d << " L=" << L << " dim=" << m.basis->dim() << "\n"
              << std::scientific << std::setprecision(3)
              << std::setw(44) << "Psi_i^dag Psi_j - delta_ij Pi_{<=L-1}" << def.isometry << "\n"
              << std::setw(44) << "sum Psi_i Psi_i^dag - (I - |Omega><Omega|)" << def.completeness << "\n"
              << std::setw(44) << "Psi_i^dag Psi_j - delta_ij I" << def.isometry_vs_identity << "\n"
              << std::setw(44) << "sum Psi_i Psi_i^dag - I" << def.completeness_vs_identity << "\n"
              << "truncated relations " << (def.pass ? "PASS" : "FAIL") << "\n";
    return def.pass ? kExitPass : kExitCheckFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int batch(const fs::path& dir, fs::path out_dir, ReportFormat format, bool verbose) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    std::cerr << "not a directory: " << dir.string() << "\n";
    return kExitConfigError;
  }
  if (out_dir.empty()) out_dir = dir / "reports";
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "cannot create " << out_dir.string() << ": " << ec.message() << "\n";
    return kExitConfigError;
  }

  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());

  const std::string ext = format == ReportFormat::machine ? ".report.json" : ".report.txt";
  std::vector<std::future<int>> jobs;
  for (const auto& cfg : configs) {
    const std::string out = (out_dir / (cfg.stem().string() + ext)).string();
    jobs.push_back(std::async(std::launch::async, run_one, cfg, out, format, verbose));
  }
  int worst = kExitPass;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const int code = jobs[i].get();
    std::cout << std::left << std::setw(40) << configs[i].filename().string() << " exit=" << code << "\n";
    worst = std::max(worst, code);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recovery operators for errors generated by a Cuntz gauge multiplet"};
  app.require_subcommand(1);

  const std::map<std::string, ReportFormat> formats{{"machine", ReportFormat::machine},
                                                    {"text", ReportFormat::text}};
  ReportFormat format = ReportFormat::machine;
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log per-scenario verdicts to stderr");

  auto* run = app.add_subcommand("run", "Run one scenario config");
  std::string config_path;
  std::string out_path = "-";
  run->add_option("--config", config_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_path, "Report destination, '-' for stdout");
  run->add_option("--format", format, "machine|text")->transform(CLI::CheckedTransformer(formats));

  auto* algebra = app.add_subcommand("check-algebra", "Report the truncated Cuntz relation defects");
  int d = 2;
  int L = 3;
  double tolerance = tol::kRelation;
  algebra->add_option("--d", d, "Alphabet size")->required();
  algebra->add_option("--L", L, "Maximum word length")->required();
  algebra->add_option("--tol", tolerance, "Tolerance");

  auto* batch_cmd = app.add_subcommand("batch", "Run every *.json config in a directory concurrently");
  std::string dir;
  std::string out_dir;
  batch_cmd->add_option("--dir", dir, "Config directory")->required();
  batch_cmd->add_option("--out-dir", out_dir, "Report directory (default <dir>/reports)");
  batch_cmd->add_option("--format", format, "machine|text")->transform(CLI::CheckedTransformer(formats));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfigError;
  }

  if (*run) return run_one(config_path, out_path, format, verbose);
  if (*algebra) return check_algebra(d, L, tolerance);
  if (*batch_cmd) return batch(dir, out_dir, format, verbose);
  return kExitConfigError;
}
