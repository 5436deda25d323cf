#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gravicut/cut.hpp"

namespace gravicut {

/// Experiment description. Loaded from a flat key=value config file; CLI
/// flags override file values.
struct ExperimentConfig {
  std::string objective = "quadratic";
  double q = 0.0;             // quadratic scale; 0 picks the per-dim default
  double affine_scale = 0.0;  // max-affine slope; 0 picks the per-dim default
  std::string noise = "bernoulli";
  double noise_width = 0.1;   // additive_uniform half-width
  std::vector<int> dims = {2};
  std::vector<long> budgets = {100000};
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  std::uint64_t master_seed = 1;
  double delta = 0.1;
  std::string out_dir = "out";
  bool trace = false;
  std::string suite = "all";
  double eta_scale = 1.0;  // fault-injection fixture for the validation suite
};

/// Parse `key=value` lines ('#' starts a comment). Unknown keys are errors.
/// Returns an error message, or empty on success.
std::string load_config_file(const std::string& path, ExperimentConfig& cfg);

/// Structural checks (nonempty lists, positive budgets, distinct seeds, known
/// identifiers). Returns an error message, or empty when valid.
std::string validate_config(const ExperimentConfig& cfg);

/// Canonical test problem for a dimension: box [-1,1]^d with a fixed
/// off-center minimizer pattern; scales are capped so the objective stays
/// convex with range inside [0,1].
ProblemSpec make_default_problem(const ExperimentConfig& cfg, int dim);

NoiseModel make_noise(const ExperimentConfig& cfg);

/// Execute one run per (dim, budget, seed), in that order. Runs execute on a
/// worker pool capped by GRAVICUT_THREADS; per-run streams are derived by
/// hashing (master_seed, dim, budget, seed), so results do not depend on
/// scheduling. Trace lines, when requested, are collected per run.
std::vector<RunReport> run_experiments(const ExperimentConfig& cfg,
                                       std::vector<std::string>* trace_lines = nullptr);

void write_runs_csv(std::ostream& os, const std::vector<RunReport>& reports);

struct SummaryRow {
  int dim = 0;
  long budget = 0;
  double median_regret = 0.0;
  double iqr = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<RunReport>& reports);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

/// Log-log regret-vs-budget plot, one series per dimension. Self-contained
/// static SVG.
std::string render_svg_plot(const std::vector<SummaryRow>& rows);

int cmd_run(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_validate(const ExperimentConfig& cfg);

double median_of(std::vector<double> v);
double iqr_of(std::vector<double> v);

}  // namespace gravicut
