// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "rollstab/config.hpp"
#include "rollstab/decay.hpp"
#include "rollstab/error.hpp"
#include "rollstab/report.hpp"

namespace rollstab {

// Exit statuses of the command runner.
enum class ExitStatus : int { pass = 0, criterion_failed = 1, usage = 2, divergence = 3 };
ExitStatus exit_status_for(ErrorCode code);

struct CommandResult {
  ExitStatus status = ExitStatus::pass;
  Json summary;
  std::string out_dir;
};

// Each command validates the config, creates cfg.out, writes its artifacts
// plus config.resolved and manifest.json, and returns a summary. Errors are
// thrown as rollstab::Error; run_command converts them into statuses.
CommandResult run_spectrum(const ExperimentConfig& cfg);
CommandResult run_kernel(const ExperimentConfig& cfg);
CommandResult run_simulate(const ExperimentConfig& cfg);
CommandResult run_toy(const ExperimentConfig& cfg);
CommandResult run_verify_all(const ExperimentConfig& cfg);
CommandResult run_command(const ExperimentConfig& cfg);

// A simulation with the checks its preset implies.
struct ExponentCheck {
  NormId id = NormId::r;
  double theory = 0, tolerance = 0;
  bool upper_bound_only = false;  // pass when exponent <= theory + tolerance
  RateFit fit;
  bool pass = false;
  std::string error;
};

struct RunAnalysis {
  Trajectory trajectory;
  InitialData initial;
  FitWindow window;
  std::vector<ExponentCheck> checks;
  // Template at t = 0 in units of eps, used as the run constant.
  double M0_hat = 0;
  double eta_T_over_eps = 0;
  Json extra;      // preset-specific quantities (bounds, growth factors)
  bool pass = false;
};

Grid grid_of(const ExperimentConfig& cfg);
InitialSpec initial_spec_of(const ExperimentConfig& cfg);
SimulationOptions simulation_options_of(const ExperimentConfig& cfg);
// Runs the trajectory and evaluates the checks for cfg.preset (none for a
// custom run, which then passes unless it diverges).
RunAnalysis analyze_run(const ExperimentConfig& cfg);
Json to_json(const RunAnalysis& a);

// Acceptance-style criteria 1..12, grouped into suites symbol (1-3),
// semigroup (4, 5), dynamics (6-10, 12) and decay (11).
struct CriterionResult {
  int id = 0;
  std::string suite, title;
  bool pass = false;
  double seconds = 0, budget_seconds = 0;
  Json detail;
  std::string error;
};
// "" selects all; otherwise a comma list of suite names and criterion numbers.
std::vector<int> select_criteria(const std::string& only);
CriterionResult run_criterion(int id, const ExperimentConfig& cfg);
Json to_json(const CriterionResult& r);

}  // namespace rollstab
