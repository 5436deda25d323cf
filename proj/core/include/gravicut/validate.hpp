#pragma once

#include <string>
#include <vector>

#include "gravicut/cut.hpp"

namespace gravicut {

struct PropertyResult {
  std::string name;
  bool pass = false;
  std::string details;
};

/// Coverage of the value-estimator deviation bound eta_conc(1/delta)/sqrt(N)
/// under Bernoulli noise, against a high-effort noiseless reference.
/// eta_scale rescales the bound (fault-injection fixture; 1.0 in normal use).
struct ValueConcentrationParams {
  int dim = 3;
  double c = 0.15;
  long n_samples = 4096;
  int trials = 500;
  double delta = 0.1;
  long ref_samples = 10'000'000;
  double eta_scale = 1.0;
};
PropertyResult check_value_concentration(const ValueConcentrationParams& p,
                                         std::uint64_t seed);

/// Coverage of the directional gradient deviation bound
/// eta_conc(1/delta) |u| sqrt(d) / (c sqrt(N)), N >= d log(2/delta).
struct GradientConcentrationParams {
  int dim = 3;
  double c = 0.15;
  long n_samples = 4096;
  int trials = 500;
  double delta = 0.1;
  double eta_scale = 1.0;
};
PropertyResult check_gradient_concentration(const GradientConcentrationParams& p,
                                            std::uint64_t seed);

/// Mean of noiseless gradient estimates against a common-random-numbers
/// central finite difference of the Monte-Carlo smoothed value.
struct StokesParams {
  int dim = 2;
  int reps = 200;
  long n_per_rep = 4096;
  double c = 0.1;
  double fd_step = 1e-3;
  long fd_samples = 10'000'000;
  double rel_tol = 0.05;
  double min_component = 0.05;
};
PropertyResult check_stokes(const StokesParams& p, std::uint64_t seed);

/// On random quadratics passing the smoothing-gap premise, the smoothed
/// gradient at z correlates with z - z_tilde by at least 3/4 of the value gap
/// (up to Monte-Carlo error).
struct CorrelationParams {
  int dim = 2;
  int instances = 100;
  int reps = 200;
  long n_per_rep = 2048;
  long mc_samples = 100'000;
};
PropertyResult check_correlation(const CorrelationParams& p, std::uint64_t seed);

/// Whitened interior samples of random cut boxes stay inside the ball of
/// radius 2 sqrt(d) (1 + slack).
struct KlsParams {
  std::vector<int> dims = {2, 5, 10};
  int bodies_per_dim = 4;
  int max_cuts = 3;
  long samples = 100'000;
  double slack = 0.1;
};
PropertyResult check_kls(const KlsParams& p, std::uint64_t seed);

/// Cuts through near-barycentric whitened points (|z| <= 1/(4e sqrt(d)))
/// leave both sides with nontrivial volume: kept fraction in [0.10, 0.90]
/// for at least the given share of cuts.
struct CutVolumeParams {
  std::vector<int> dims = {2, 3};
  int bodies_per_dim = 10;
  int cuts_per_body = 4;
  long volume_samples = 20'000;
  double min_share = 0.9;
};
PropertyResult check_cut_volume(const CutVolumeParams& p, std::uint64_t seed);

/// Query accounting and displacement contracts of the cutting-point search
/// over a battery of configurations, including the budget-exhaustion path.
struct FcpAccountingParams {
  int runs_per_config = 5;
};
PropertyResult check_fcp_accounting(const FcpAccountingParams& p, std::uint64_t seed);

/// Named suite used by the validate command: one of "concentration",
/// "stokes", "correlation", "kls", "cutvolume", "fcp", or "all".
std::vector<PropertyResult> run_validation_suite(const std::string& suite,
                                                 double eta_scale,
                                                 std::uint64_t seed);

}  // namespace gravicut
