#include "gravicut/cut.hpp"

#include <chrono>
#include <cmath>

namespace gravicut {

std::optional<CutParams> derive_params(long n, int d, double diam, double r,
                                       double delta) {
  if (n < 1 || d < 1) throw std::invalid_argument("budget and dimension must be >= 1");
  if (!(diam > 0.0) || !(r > 0.0) || r > diam)
    throw std::invalid_argument("need 0 < r <= diam");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0,1)");

  const double log_arg = static_cast<double>(n) * d * diam / r;
  if (log_arg <= 1.0) return std::nullopt;
  const double n_cut_real =
      static_cast<double>(n) * std::log(10.0 / 9.0) / (4.0 * d * std::log(log_arg));
  const long n_cut = static_cast<long>(std::floor(n_cut_real));
  if (n_cut < 1) return std::nullopt;

  // Fixed point N = floor(n_cut / (4 M(N))) iterated from N = n_cut. Small
  // budgets can land on a two-cycle; the smaller point is consistent within
  // one iteration step and keeps 4 M(N) N <= n_cut.
  long n_fcp = n_cut;
  long prev = -1;
  for (int iter = 0; iter < 50; ++iter) {
    long next = n_cut / (4 * fcp_depth_cap(n_fcp));
    if (next < 1) {
      n_fcp = next;
      break;
    }
    if (next == n_fcp) break;
    if (next == prev) {
      n_fcp = std::min(n_fcp, next);
      break;
    }
    prev = n_fcp;
    n_fcp = next;
  }
  if (n_fcp < 1) return std::nullopt;

  CutParams p;
  p.total_budget = n;
  p.dim = d;
  p.diam = diam;
  p.inner_radius = r;
  p.delta = delta;
  p.n_cut = n_cut;
  p.n_fcp = n_fcp;
  p.m_fcp = fcp_depth_cap(n_fcp);
  p.m_cut = static_cast<long>(std::ceil(5.0 * static_cast<double>(n) / n_cut));
  p.smoothing_radius =
      1.0 / (8.0 * std::exp(1.0) * static_cast<double>(p.m_fcp) * std::sqrt(d));
  return p;
}

namespace {

Vec clamp_to_box(Vec x, const Box& box) {
  for (Eigen::Index k = 0; k < x.size(); ++k)
    x[k] = std::clamp(x[k], box.lo[k], box.hi[k]);
  return x;
}

}  // namespace

void run_cut_iteration(OptState& state, const CutParams& params,
                       const ProblemSpec& spec, const NoiseModel& noise,
                       RngStream& rng, const IterationOptions& opts) {
  if (state.terminal) return;

  IterationRecord rec;
  rec.iteration = state.iteration;
  rec.incumbent_x = state.incumbent_x;
  rec.incumbent_f = state.incumbent_f;

  IsotropicFrame frame;
  try {
    frame = estimate_frame(state.body, frame_sample_count(params.dim), rng);
  } catch (const DegenerateBody&) {
    state.terminal = true;
    state.terminal_reason = "degenerate_body";
    rec.anomaly = "degenerate_body";
    rec.minimizer_in_body = state.body.contains(spec.minimizer);
    state.history.push_back(std::move(rec));
    return;
  }
  rec.frame_mu = frame.mu;

  FcpParams fp = FcpParams::derive(params.smoothing_radius, params.n_fcp, params.delta);
  FcpResult found = run_fcp(Vec::Zero(params.dim), frame, fp, spec, noise,
                            state.ledger, rng, opts.trace);
  rec.z = found.z;
  rec.g_hat = found.g_hat;
  rec.fcp_queries = found.queries_used;
  rec.fcp_displacement = found.z.norm();
  rec.fcp_depth = found.depth;
  if (found.depth_cap_hit) rec.anomaly = "fcp_depth_cap";

  if (found.exhausted) {
    state.terminal = true;
    state.terminal_reason = "budget_exhausted";
    rec.minimizer_in_body = state.body.contains(spec.minimizer);
    state.history.push_back(std::move(rec));
    return;
  }

  if (found.g_hat <= state.incumbent_f) {
    state.incumbent_x = clamp_to_box(frame.unwhiten(found.z), state.body.base());
    state.incumbent_f = found.g_hat;
    rec.incumbent_updated = true;
    rec.incumbent_x = state.incumbent_x;
    rec.incumbent_f = state.incumbent_f;
  }

  SmoothedQuery gq{frame, found.z, params.smoothing_radius, params.n_cut,
                   Phase::Gradient};
  GradientEstimate grad = estimate_gradient(gq, spec, noise, state.ledger, rng);
  if (grad.exhausted) {
    state.terminal = true;
    state.terminal_reason = "budget_exhausted";
    rec.minimizer_in_body = state.body.contains(spec.minimizer);
    state.history.push_back(std::move(rec));
    return;
  }
  rec.gradient_norm = grad.gradient.norm();
  if (rec.gradient_norm == 0.0) {
    state.terminal = true;
    state.terminal_reason = "zero_gradient";
    rec.anomaly = "zero_gradient";
    rec.minimizer_in_body = state.body.contains(spec.minimizer);
    state.history.push_back(std::move(rec));
    return;
  }

  try {
    ConvexBody next = apply_cut(state.body, frame, found.z, grad.gradient, rng);
    if (opts.volume_samples > 0)
      rec.kept_fraction =
          estimate_volume_fraction(next, state.body, opts.volume_samples, rng);
    state.body = std::move(next);
  } catch (const EmptyCut&) {
    state.terminal = true;
    state.terminal_reason = "empty_cut";
    rec.anomaly = "empty_cut";
    rec.minimizer_in_body = state.body.contains(spec.minimizer);
    state.history.push_back(std::move(rec));
    return;
  }

  state.iteration += 1;
  rec.minimizer_in_body = state.body.contains(spec.minimizer);
  state.history.push_back(std::move(rec));
}

DriverResult run_driver(const ProblemSpec& spec, const NoiseModel& noise, long n,
                        double delta, RngStream& rng, const DriverOptions& opts) {
  if (!spec.interior_minimizer)
    throw std::invalid_argument(
        "driver requires an objective with an interior minimizer");

  const auto t0 = std::chrono::steady_clock::now();
  const Vec center = spec.domain.center();

  RunReport report;
  report.dim = spec.dim;
  report.budget = n;
  report.seed = opts.seed_label;

  auto finalize = [&](const Vec& x_hat, std::optional<OptState> state) {
    std::optional<double> fx = spec.evaluate(x_hat);
    report.simple_regret = (fx ? *fx : 1.0) - spec.min_value;
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    report.anomaly_count = static_cast<int>(report.anomalies.size());
    return DriverResult{x_hat, std::move(report), std::move(state)};
  };

  std::optional<CutParams> params = derive_params(n, spec.dim, spec.diameter,
                                                  spec.inner_radius, delta);
  if (!params) {
    // Degraded path: spend the budget estimating the value at the center.
    QueryLedger ledger(n);
    double sum = 0.0;
    long taken = 0;
    while (true) {
      Observation obs = query(spec, noise, center, Phase::Init, ledger, rng);
      if (obs.exhausted()) break;
      sum += obs.infeasible() ? 1.0 : obs.y;
      ++taken;
    }
    (void)sum;
    report.degraded = true;
    report.anomalies.push_back("budget_too_small");
    report.terminal_reason = "budget_too_small";
    report.q_init = ledger.phase_count(Phase::Init);
    return finalize(center, std::nullopt);
  }

  QueryLedger ledger(n);
  double f0_sum = 0.0;
  long f0_taken = 0;
  bool init_exhausted = false;
  for (long i = 0; i < params->n_fcp; ++i) {
    Observation obs = query(spec, noise, center, Phase::Init, ledger, rng);
    if (obs.exhausted()) {
      init_exhausted = true;
      break;
    }
    f0_sum += obs.infeasible() ? 1.0 : obs.y;
    ++f0_taken;
  }
  double f0 = f0_taken > 0 ? f0_sum / static_cast<double>(f0_taken)
                           : std::numeric_limits<double>::quiet_NaN();

  OptState state(ConvexBody(spec.domain), center, f0, std::move(ledger));
  if (init_exhausted) {
    state.terminal = true;
    state.terminal_reason = "budget_exhausted";
  }

  IterationOptions iter_opts;
  iter_opts.volume_samples = opts.volume_samples;
  iter_opts.trace = opts.trace;
  while (!state.terminal && state.ledger.remaining() > 0)
    run_cut_iteration(state, *params, spec, noise, rng, iter_opts);
  if (!state.terminal) {
    state.terminal = true;
    state.terminal_reason = "budget_exhausted";
  }

  report.iterations = state.iteration;
  report.q_init = state.ledger.phase_count(Phase::Init);
  report.q_fcp = state.ledger.phase_count(Phase::Fcp);
  report.q_grad = state.ledger.phase_count(Phase::Gradient);
  report.terminal_reason = state.terminal_reason;
  for (const auto& r : state.history)
    if (!r.anomaly.empty()) report.anomalies.push_back(r.anomaly);

  Vec x_hat = state.incumbent_x;
  return finalize(x_hat, std::move(state));
}

}  // namespace gravicut
