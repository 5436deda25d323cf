// gravicut CLI: single runs, parameter sweeps, and the property
// validation battery.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "gravicut/harness.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string objective, noise, out_dir, suite;
  std::vector<int> dims;
  std::vector<long> budgets;
  std::vector<std::string> seeds;
  double q = -1.0, delta = -1.0, noise_width = -1.0, eta_scale = -1.0;
  long master_seed = -1;
  bool trace = false;
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "flat key=value config file");
  cmd->add_option("--objective", o.objective, "quadratic | linear | max_affine");
  cmd->add_option("--noise", o.noise, "bernoulli | additive_uniform | noiseless");
  cmd->add_option("--dim", o.dims, "dimension(s)")->delimiter(',');
  cmd->add_option("--budget", o.budgets, "query budget(s)")->delimiter(',');
  cmd->add_option("--seeds", o.seeds,
                  "seed list, or a single integer acting as a seed count")
      ->delimiter(',');
  cmd->add_option("--delta", o.delta, "confidence parameter in (0,1)");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_flag("--trace", o.trace, "write per-round search traces");
  cmd->add_option("--q", o.q, "quadratic scale (validated against the domain)");
  cmd->add_option("--noise-width", o.noise_width,
                  "additive_uniform half-width, at most 0.25");
  cmd->add_option("--master-seed", o.master_seed, "master seed for stream derivation");
  cmd->add_option("--suite", o.suite,
                  "validation suite: concentration | stokes | correlation | kls "
                  "| cutvolume | fcp | all");
  cmd->add_option("--eta-scale", o.eta_scale,
                  "fault-injection fixture: rescales the concentration width");
}

// File first, flags second: flags win.
int apply(const CliOverrides& o, gravicut::ExperimentConfig& cfg) {
  if (!o.config_path.empty()) {
    std::string err = gravicut::load_config_file(o.config_path, cfg);
    if (!err.empty()) {
      std::cerr << "config error: " << err << "\n";
      return 2;
    }
  }
  if (!o.objective.empty()) cfg.objective = o.objective;
  if (!o.noise.empty()) cfg.noise = o.noise;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.suite.empty()) cfg.suite = o.suite;
  if (!o.dims.empty()) cfg.dims = o.dims;
  if (!o.budgets.empty()) cfg.budgets = o.budgets;
  if (o.q >= 0.0) cfg.q = o.q;
  if (o.delta >= 0.0) cfg.delta = o.delta;
  if (o.noise_width >= 0.0) cfg.noise_width = o.noise_width;
  if (o.eta_scale >= 0.0) cfg.eta_scale = o.eta_scale;
  if (o.master_seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(o.master_seed);
  if (o.trace) cfg.trace = true;
  if (!o.seeds.empty()) {
    std::vector<std::uint64_t> seeds;
    for (const std::string& s : o.seeds) {
      try {
        seeds.push_back(std::stoull(s));
      } catch (...) {
        std::cerr << "config error: bad seed '" << s << "'\n";
        return 2;
      }
    }
    if (seeds.size() == 1 && o.seeds.size() == 1) {
      // single integer = seed count
      std::uint64_t count = seeds[0];
      if (count == 0) {
        std::cerr << "config error: seed count is zero\n";
        return 2;
      }
      seeds.clear();
      for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(i);
    }
    cfg.seeds = std::move(seeds);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"center-of-gravity cutting optimizer for noisy zeroth-order "
               "convex problems"};
  app.require_subcommand(1);

  CliOverrides run_o, sweep_o, validate_o;
  CLI::App* run = app.add_subcommand("run", "execute runs and write runs.csv");
  add_common_flags(run, run_o);
  CLI::App* sweep = app.add_subcommand(
      "sweep", "execute runs, aggregate medians, write summary and SVG plot");
  add_common_flags(sweep, sweep_o);
  CLI::App* validate =
      app.add_subcommand("validate", "run the property validation battery");
  add_common_flags(validate, validate_o);

  CLI11_PARSE(app, argc, argv);

  gravicut::ExperimentConfig cfg;
  try {
    if (run->parsed()) {
      if (int rc = apply(run_o, cfg)) return rc;
      return gravicut::cmd_run(cfg);
    }
    if (sweep->parsed()) {
      if (int rc = apply(sweep_o, cfg)) return rc;
      return gravicut::cmd_sweep(cfg);
    }
    if (int rc = apply(validate_o, cfg)) return rc;
    return gravicut::cmd_validate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
