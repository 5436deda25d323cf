#include "gravicut/fcp.hpp"

#include <cmath>
#include <limits>

namespace gravicut {

long fcp_depth_cap(long n_base) {
  if (n_base < 1) throw std::invalid_argument("base sample count must be positive");
  double m = std::log(2.0 * static_cast<double>(n_base)) / std::log(17.0 / 16.0) + 1.0;
  return static_cast<long>(std::ceil(m));
}

int fcp_level_count(long n_base) {
  if (n_base < 1) throw std::invalid_argument("base sample count must be positive");
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(n_base)))) + 1;
}

FcpParams FcpParams::derive(double c, long n_base, double delta) {
  if (c < 0.0) throw std::invalid_argument("smoothing radius must be nonnegative");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0,1)");
  FcpParams p;
  p.c = c;
  p.n_base = n_base;
  p.delta = delta;
  p.level_count = fcp_level_count(n_base);
  p.depth_cap = fcp_depth_cap(n_base);
  return p;
}

FcpResult run_fcp(const Vec& z0, const IsotropicFrame& frame, const FcpParams& params,
                  const ProblemSpec& spec, const NoiseModel& noise,
                  QueryLedger& ledger, RngStream& rng, const TraceSink& trace) {
  const long used_before = ledger.used();
  const double n = static_cast<double>(params.n_base);
  Vec z = z0;

  auto finish = [&](double g_hat, int depth, bool exhausted, bool cap_hit) {
    return FcpResult{z, g_hat, depth, ledger.used() - used_before, exhausted, cap_hit};
  };

  for (int s = 0;; ++s) {
    SmoothedQuery center{frame, z, 0.0, params.n_base, Phase::Fcp};
    ValueEstimate est = estimate_value(center, spec, noise, ledger, rng);
    if (est.exhausted) return finish(est.value, s, true, false);
    if (s >= params.depth_cap) return finish(est.value, s, false, true);

    const double escalation = std::pow(17.0 / 16.0, s) / (16.0 * n);
    double best_excess = -std::numeric_limits<double>::infinity();
    Vec best_candidate;
    int passing = 0;

    for (int i = 1; i <= params.level_count; ++i) {
      const double pow2_i = std::ldexp(1.0, i);
      const long candidates = 1L << i;
      const long per_candidate =
          static_cast<long>(std::ceil(n / (pow2_i * i * i)));
      const double threshold =
          escalation +
          4.0 * eta_conc(pow2_i * i * i * static_cast<double>(params.depth_cap) /
                         params.delta) *
              std::sqrt(static_cast<double>(i) * i * pow2_i / n);

      for (long j = 0; j < candidates; ++j) {
        Vec cand = z + sample_ball(frame.dim, 2.0 * params.c, rng);
        SmoothedQuery cq{frame, cand, 0.0, per_candidate, Phase::Fcp};
        ValueEstimate cest = estimate_value(cq, spec, noise, ledger, rng);
        if (cest.exhausted) return finish(est.value, s, true, false);
        double excess = cest.value - est.value - threshold;
        if (excess >= 0.0) {
          ++passing;
          if (excess > best_excess) {
            best_excess = excess;
            best_candidate = cand;
          }
        }
      }
    }

    if (trace) trace({s, z, est.value, passing});
    if (passing == 0) return finish(est.value, s, false, false);
    z = std::move(best_candidate);
  }
}

}  // namespace gravicut
