#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gravicut/fcp.hpp"

namespace gravicut {

/// Parameters of the cutting loop for a total budget n on a d-dimensional
/// problem with domain diameter diam and inner radius r.
struct CutParams {
  long total_budget = 0;
  int dim = 0;
  double diam = 0.0;
  double inner_radius = 0.0;
  double delta = 0.1;
  long n_cut = 0;              // gradient samples per iteration
  long n_fcp = 0;              // base sample count of the cutting-point search
  long m_fcp = 0;              // its depth cap
  long m_cut = 0;              // nominal iteration count ceil(5 n / n_cut)
  double smoothing_radius = 0; // c = 1 / (8 e m_fcp sqrt(d))
};

/// Derive the loop parameters. Returns nullopt (budget too small) when the
/// sample-count formula gives n_cut < 1 or the n_fcp fixed point collapses
/// below 1; the driver then degrades to pure initialization sampling at the
/// domain center.
std::optional<CutParams> derive_params(long n, int d, double diam, double r,
                                       double delta);

struct IterationRecord {
  int iteration = 0;
  Vec frame_mu;
  Vec z;                       // whitened cutting point
  double g_hat = 0.0;          // value estimate at z
  double gradient_norm = 0.0;
  long fcp_queries = 0;
  double fcp_displacement = 0.0;
  int fcp_depth = 0;
  bool incumbent_updated = false;
  Vec incumbent_x;
  double incumbent_f = 0.0;
  double kept_fraction = -1.0; // volume kept by this cut; -1 when unmeasured
  bool minimizer_in_body = false;
  std::string anomaly;         // empty when the iteration was clean
};

struct OptState {
  ConvexBody body;
  Vec incumbent_x;
  double incumbent_f = 0.0;
  QueryLedger ledger;
  int iteration = 0;
  std::vector<IterationRecord> history;
  bool terminal = false;
  std::string terminal_reason;

  OptState(ConvexBody b, Vec x0, double f0, QueryLedger l)
      : body(std::move(b)), incumbent_x(std::move(x0)), incumbent_f(f0),
        ledger(std::move(l)) {}
};

struct IterationOptions {
  long volume_samples = 0;  // when > 0, record the kept-volume fraction
  TraceSink trace;
};

/// One whiten / find-point / estimate-gradient / halve iteration. Mutates the
/// state; on budget exhaustion or an anomaly the terminal flag is set and the
/// state is left as far as the last completed step.
void run_cut_iteration(OptState& state, const CutParams& params,
                       const ProblemSpec& spec, const NoiseModel& noise,
                       RngStream& rng, const IterationOptions& opts = {});

struct RunReport {
  int dim = 0;
  long budget = 0;
  std::uint64_t seed = 0;
  double simple_regret = 0.0;
  int iterations = 0;
  long q_init = 0;
  long q_fcp = 0;
  long q_grad = 0;
  int anomaly_count = 0;
  std::vector<std::string> anomalies;
  double wall_ms = 0.0;
  bool degraded = false;
  std::string terminal_reason;
};

struct DriverResult {
  Vec x_hat;
  RunReport report;
  std::optional<OptState> state;  // final state of non-degraded runs
};

struct DriverOptions {
  long volume_samples = 0;
  TraceSink trace;
  std::uint64_t seed_label = 0;  // recorded in the report
};

/// Full optimization run: derive parameters, estimate the initial value at
/// the exact domain center, then iterate cuts until the budget is spent or a
/// terminal condition fires. Returns the incumbent and a run report.
DriverResult run_driver(const ProblemSpec& spec, const NoiseModel& noise, long n,
                        double delta, RngStream& rng,
                        const DriverOptions& opts = {});

}  // namespace gravicut
