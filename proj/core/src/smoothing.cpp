#include "gravicut/smoothing.hpp"

#include <cmath>
#include <limits>

namespace gravicut {

Vec sample_ball(int dim, double radius, RngStream& rng) {
  if (radius < 0.0) throw std::invalid_argument("ball radius must be nonnegative");
  if (radius == 0.0) return Vec::Zero(dim);
  Vec u = random_unit_vector(dim, rng);
  double r = radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
  return r * u;
}

Vec sample_sphere(int dim, double radius, RngStream& rng) {
  if (radius <= 0.0) throw std::invalid_argument("sphere radius must be positive");
  return radius * random_unit_vector(dim, rng);
}

double eta_conc(double inverse_delta) {
  if (!(inverse_delta > 0.0))
    throw std::domain_error("eta_conc argument must be positive");
  double l = std::log(2.0 * inverse_delta);
  if (l < 0.0) throw std::domain_error("eta_conc argument below 1/2");
  return 4.0 * std::sqrt(l);
}

ValueEstimate estimate_value(const SmoothedQuery& q, const ProblemSpec& spec,
                             const NoiseModel& noise, QueryLedger& ledger,
                             RngStream& rng) {
  if (q.n_samples < 1) throw std::invalid_argument("need at least one sample");
  if (q.c < 0.0) throw std::invalid_argument("smoothing radius must be nonnegative");

  // Compensated summation keeps long noiseless averages exact.
  double sum = 0.0, comp = 0.0;
  long taken = 0;
  bool exhausted = false;
  for (long i = 0; i < q.n_samples; ++i) {
    Vec point = q.c > 0.0 ? Vec(q.z + sample_ball(q.frame.dim, q.c, rng)) : q.z;
    Observation obs = query(spec, noise, q.frame.unwhiten(point), q.phase, ledger, rng);
    if (obs.exhausted()) {
      exhausted = true;
      break;
    }
    double y = obs.infeasible() ? 1.0 : obs.y;
    double t = sum + y;
    comp += std::abs(sum) >= std::abs(y) ? (sum - t) + y : (y - t) + sum;
    sum = t;
    ++taken;
  }
  double value = taken > 0 ? (sum + comp) / static_cast<double>(taken)
                           : std::numeric_limits<double>::quiet_NaN();
  return {value, taken, exhausted};
}

GradientEstimate estimate_gradient(const SmoothedQuery& q, const ProblemSpec& spec,
                                   const NoiseModel& noise, QueryLedger& ledger,
                                   RngStream& rng) {
  if (q.n_samples < 1) throw std::invalid_argument("need at least one sample");
  if (!(q.c > 0.0))
    throw std::invalid_argument("gradient estimation needs a positive radius");

  const int d = q.frame.dim;
  Vec accum = Vec::Zero(d);
  long taken = 0;
  bool exhausted = false;
  for (long i = 0; i < q.n_samples; ++i) {
    Vec step = sample_sphere(d, q.c, rng);
    Observation obs =
        query(spec, noise, q.frame.unwhiten(q.z + step), q.phase, ledger, rng);
    if (obs.exhausted()) {
      exhausted = true;
      break;
    }
    accum += step * (obs.infeasible() ? 1.0 : obs.y);
    ++taken;
  }
  Vec grad = Vec::Zero(d);
  if (taken > 0)
    grad = accum * (static_cast<double>(d) /
                    (q.c * q.c * static_cast<double>(taken)));
  return {std::move(grad), taken, exhausted};
}

}  // namespace gravicut
