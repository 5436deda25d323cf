#pragma once

#include "gravicut/geometry.hpp"
#include "gravicut/oracle.hpp"

namespace gravicut {

/// Uniform point in the Euclidean ball of the given radius (radius >= 0),
/// via a normalized Gaussian direction scaled by radius * U^(1/dim).
Vec sample_ball(int dim, double radius, RngStream& rng);

/// Uniform point on the sphere of the given radius (radius > 0).
Vec sample_sphere(int dim, double radius, RngStream& rng);

/// Concentration width 4 * sqrt(log(2 * inverse_delta)). The argument is the
/// "1/delta" payload; values below 1/2 put the root over a negative number
/// and raise std::domain_error.
double eta_conc(double inverse_delta);

/// One smoothed estimate request: evaluate around the whitened point z with
/// smoothing radius c (c == 0 samples the point itself) using n_samples
/// queries booked under `phase`.
struct SmoothedQuery {
  IsotropicFrame frame;
  Vec z;
  double c = 0.0;
  long n_samples = 1;
  Phase phase = Phase::Fcp;
};

struct ValueEstimate {
  double value = 0.0;  // average of the samples taken; NaN if none were
  long samples = 0;
  bool exhausted = false;
};

struct GradientEstimate {
  Vec gradient;
  long samples = 0;
  bool exhausted = false;
};

/// Average of noisy observations of f at unwhiten(z + Z_i), Z_i uniform in
/// the ball of radius c. Infeasible observations count as 1.0 (the worst
/// in-range value). On budget exhaustion the partial average is returned
/// with the flag set.
ValueEstimate estimate_value(const SmoothedQuery& q, const ProblemSpec& spec,
                             const NoiseModel& noise, QueryLedger& ledger,
                             RngStream& rng);

/// Sphere-sampling gradient estimator: (d / (c^2 N)) * sum Z_i * y_i with
/// Z_i uniform on the sphere of radius c. Requires c > 0. Infeasible and
/// exhaustion handling as in estimate_value.
GradientEstimate estimate_gradient(const SmoothedQuery& q, const ProblemSpec& spec,
                                   const NoiseModel& noise, QueryLedger& ledger,
                                   RngStream& rng);

}  // namespace gravicut
