#pragma once

#include <functional>

#include "gravicut/smoothing.hpp"

namespace gravicut {

/// Depth cap of the cutting-point search for a base sample count N:
/// ceil(log(2N) / log(17/16) + 1).
long fcp_depth_cap(long n_base);

/// Number of candidate levels for a base sample count N: ceil(log2 N) + 1.
int fcp_level_count(long n_base);

struct FcpParams {
  double c = 0.0;       // smoothing radius; candidates are drawn in B2(2c)
  long n_base = 1;      // base sample count N
  double delta = 0.1;   // confidence parameter
  int level_count = 1;  // I_N
  long depth_cap = 1;   // M_FCP

  static FcpParams derive(double c, long n_base, double delta);
};

/// One search round, emitted to the trace sink.
struct FcpRoundTrace {
  int round = 0;
  Vec z;
  double g_hat = 0.0;
  int passing_candidates = 0;
};

using TraceSink = std::function<void(const FcpRoundTrace&)>;

struct FcpResult {
  Vec z;                      // whitened cutting-point candidate
  double g_hat = 0.0;         // value estimate at z
  int depth = 0;              // rounds consumed
  long queries_used = 0;
  bool exhausted = false;     // budget ran out mid-search
  bool depth_cap_hit = false; // anomaly: the cap converted a runaway recursion
};

/// Search for a cutting point near z0. Per round: estimate the value at the
/// current point with N samples; for each level i <= I_N draw 2^i candidates
/// uniformly in B2(2c) around it and estimate each with ceil(N / (2^i i^2))
/// samples; move to the candidate whose estimate beats the escalation
/// threshold by the largest excess, or return the current point when none
/// passes. Hard stop at depth_cap.
FcpResult run_fcp(const Vec& z0, const IsotropicFrame& frame, const FcpParams& params,
                  const ProblemSpec& spec, const NoiseModel& noise,
                  QueryLedger& ledger, RngStream& rng,
                  const TraceSink& trace = {});

}  // namespace gravicut
