#include "gravicut/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gravicut {

namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

// Largest r with the Euclidean ball around x inside the box (the smallest
// per-coordinate margin).
double inner_radius_of(const Box& box, const Vec& x) {
  double r = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < x.size(); ++k)
    r = std::min({r, x[k] - box.lo[k], box.hi[k] - x[k]});
  return r;
}

// max over the box of |x - c|^2, attained at a corner.
double max_sq_dist(const Box& box, const Vec& c) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    double a = c[k] - box.lo[k];
    double b = box.hi[k] - c[k];
    double m = std::max(a, b);
    s += m * m;
  }
  return s;
}

double max_inf_dist(const Box& box, const Vec& c) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    s = std::max({s, c[k] - box.lo[k], box.hi[k] - c[k]});
  return s;
}

}  // namespace

std::optional<double> ProblemSpec::evaluate(const Vec& x) const {
  if (!domain.contains(x)) return std::nullopt;
  switch (objective) {
    case ObjectiveId::Quadratic: {
      double v = quad_scale * (x - minimizer).squaredNorm();
      return std::min(1.0, v);
    }
    case ObjectiveId::ClippedLinear:
      return clip01(lin_slope.dot(x - lin_anchor) + lin_offset);
    case ObjectiveId::MaxAffine:
      return clip01(affine_scale * (x - minimizer).lpNorm<Eigen::Infinity>() +
                    affine_offset);
  }
  return std::nullopt;
}

ProblemSpec make_quadratic(Box domain, Vec x_star, double q) {
  if (x_star.size() != domain.dim())
    throw std::invalid_argument("minimizer dimension mismatch");
  if (q < 0.0) throw std::invalid_argument("quadratic scale must be nonnegative");
  double r = inner_radius_of(domain, x_star);
  if (!(r > 0.0)) throw std::invalid_argument("minimizer must be interior");
  if (q * max_sq_dist(domain, x_star) > 1.0 + 1e-12)
    throw std::invalid_argument(
        "quadratic exceeds 1 on the domain (clip would break convexity)");

  ProblemSpec s;
  s.dim = domain.dim();
  s.objective = ObjectiveId::Quadratic;
  s.quad_scale = q;
  s.minimizer = std::move(x_star);
  s.min_value = 0.0;
  s.inner_radius = r;
  s.diameter = domain.diameter();
  s.interior_minimizer = true;
  s.domain = std::move(domain);
  return s;
}

ProblemSpec make_clipped_linear(Box domain, Vec anchor, Vec slope, double offset) {
  if (anchor.size() != domain.dim() || slope.size() != domain.dim())
    throw std::invalid_argument("dimension mismatch");

  // Range over the box, attained at corners.
  double base = offset - slope.dot(anchor);
  double lo_val = base, hi_val = base;
  for (Eigen::Index k = 0; k < slope.size(); ++k) {
    lo_val += std::min(slope[k] * domain.lo[k], slope[k] * domain.hi[k]);
    hi_val += std::max(slope[k] * domain.lo[k], slope[k] * domain.hi[k]);
  }
  if (lo_val < -1e-12 || hi_val > 1.0 + 1e-12)
    throw std::invalid_argument(
        "linear objective leaves [0,1] on the domain (clip would break convexity)");

  ProblemSpec s;
  s.dim = domain.dim();
  s.objective = ObjectiveId::ClippedLinear;
  s.lin_slope = slope;
  s.lin_anchor = std::move(anchor);
  s.lin_offset = offset;
  // Boundary minimizer at the corner minimizing the linear form.
  Vec corner(domain.dim());
  for (Eigen::Index k = 0; k < slope.size(); ++k)
    corner[k] = slope[k] > 0.0 ? domain.lo[k] : domain.hi[k];
  s.minimizer = std::move(corner);
  s.min_value = lo_val;
  s.inner_radius = 0.0;
  s.diameter = domain.diameter();
  s.interior_minimizer = false;
  s.domain = std::move(domain);
  return s;
}

ProblemSpec make_max_affine(Box domain, Vec x_star, double scale, double f_star) {
  if (x_star.size() != domain.dim())
    throw std::invalid_argument("minimizer dimension mismatch");
  if (scale <= 0.0) throw std::invalid_argument("max-affine scale must be positive");
  if (f_star < 0.0 || f_star > 1.0)
    throw std::invalid_argument("minimum value must lie in [0,1]");
  double r = inner_radius_of(domain, x_star);
  if (!(r > 0.0)) throw std::invalid_argument("minimizer must be interior");
  if (scale * max_inf_dist(domain, x_star) + f_star > 1.0 + 1e-12)
    throw std::invalid_argument(
        "max-affine exceeds 1 on the domain (clip would break convexity)");

  ProblemSpec s;
  s.dim = domain.dim();
  s.objective = ObjectiveId::MaxAffine;
  s.affine_scale = scale;
  s.affine_offset = f_star;
  s.minimizer = std::move(x_star);
  s.min_value = f_star;
  s.inner_radius = r;
  s.diameter = domain.diameter();
  s.interior_minimizer = true;
  s.domain = std::move(domain);
  return s;
}

NoiseModel NoiseModel::additive_uniform(double a) {
  if (a < 0.0 || a > 0.25)
    throw std::invalid_argument("additive noise half-width must lie in [0, 0.25]");
  return {Kind::AdditiveUniform, a};
}

double NoiseModel::apply(double f, RngStream& rng) const {
  switch (kind) {
    case Kind::Noiseless:
      return f;
    case Kind::Bernoulli:
      return rng.uniform01() < f ? 1.0 : 0.0;
    case Kind::AdditiveUniform:
      return f + rng.uniform(-width, width);
  }
  return f;
}

Observation query(const ProblemSpec& spec, const NoiseModel& noise, const Vec& x,
                  Phase phase, QueryLedger& ledger, RngStream& rng) {
  if (!ledger.try_consume(phase))
    return {Observation::Status::BudgetExhausted, 0.0};
  std::optional<double> f = spec.evaluate(x);
  if (!f) return {Observation::Status::Infeasible, 0.0};
  return {Observation::Status::Value, noise.apply(*f, rng)};
}

const char* objective_name(ObjectiveId id) {
  switch (id) {
    case ObjectiveId::Quadratic: return "quadratic";
    case ObjectiveId::ClippedLinear: return "linear";
    case ObjectiveId::MaxAffine: return "max_affine";
  }
  return "?";
}

std::optional<ObjectiveId> objective_from_name(const std::string& name) {
  if (name == "quadratic") return ObjectiveId::Quadratic;
  if (name == "linear") return ObjectiveId::ClippedLinear;
  if (name == "max_affine") return ObjectiveId::MaxAffine;
  return std::nullopt;
}

std::optional<NoiseModel::Kind> noise_from_name(const std::string& name) {
  if (name == "noiseless") return NoiseModel::Kind::Noiseless;
  if (name == "bernoulli") return NoiseModel::Kind::Bernoulli;
  if (name == "additive_uniform") return NoiseModel::Kind::AdditiveUniform;
  return std::nullopt;
}

const char* noise_name(NoiseModel::Kind kind) {
  switch (kind) {
    case NoiseModel::Kind::Noiseless: return "noiseless";
    case NoiseModel::Kind::Bernoulli: return "bernoulli";
    case NoiseModel::Kind::AdditiveUniform: return "additive_uniform";
  }
  return "?";
}

}  // namespace gravicut
