#pragma once

#include <array>
#include <optional>
#include <string>

#include "gravicut/geometry.hpp"
#include "gravicut/rng.hpp"

namespace gravicut {

enum class ObjectiveId { Quadratic, ClippedLinear, MaxAffine };

/// A bounded convex test objective over a box domain, with its minimizer and
/// minimum value known in closed form.
///
/// Zoo:
///   quadratic      f(x) = min(1, q * |x - x*|^2)
///   clipped linear f(x) = clip(<a, x - anchor> + offset, 0, 1)
///   max-affine     f(x) = clip(s * |x - x*|_inf + f*, 0, 1)
///
/// Construction validates that the clips are inactive on the domain, so every
/// instance is convex with range inside [0, 1]. The clipped-linear objective
/// attains its minimum on the boundary; it is excluded from end-to-end runs
/// and exists for estimator tests only (interior_minimizer == false).
struct ProblemSpec {
  int dim = 0;
  Box domain;
  ObjectiveId objective = ObjectiveId::Quadratic;
  Vec minimizer;
  double min_value = 0.0;
  double inner_radius = 0.0;  // largest r with B2(minimizer, r) inside the box
  double diameter = 0.0;
  bool interior_minimizer = false;

  // objective parameters (only the relevant ones are used)
  double quad_scale = 0.0;
  Vec lin_slope;
  Vec lin_anchor;
  double lin_offset = 0.0;
  double affine_scale = 0.0;
  double affine_offset = 0.0;

  /// Noiseless evaluation; nullopt marks an infeasible (out-of-domain) point.
  std::optional<double> evaluate(const Vec& x) const;
};

ProblemSpec make_quadratic(Box domain, Vec x_star, double q);
ProblemSpec make_clipped_linear(Box domain, Vec anchor, Vec slope, double offset);
ProblemSpec make_max_affine(Box domain, Vec x_star, double scale, double f_star);

struct NoiseModel {
  enum class Kind { Noiseless, Bernoulli, AdditiveUniform };
  Kind kind = Kind::Bernoulli;
  double width = 0.0;  // additive_uniform half-width, at most 0.25

  static NoiseModel noiseless() { return {Kind::Noiseless, 0.0}; }
  static NoiseModel bernoulli() { return {Kind::Bernoulli, 0.0}; }
  static NoiseModel additive_uniform(double a);

  double apply(double f, RngStream& rng) const;
};

enum class Phase { Init = 0, Fcp = 1, Gradient = 2 };

/// Hard budget counter. One optimization run owns one ledger and issues
/// queries sequentially; used never exceeds budget.
class QueryLedger {
 public:
  explicit QueryLedger(long budget) : budget_(budget) {
    if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  }

  long budget() const { return budget_; }
  long used() const { return used_; }
  long remaining() const { return budget_ - used_; }
  long phase_count(Phase p) const { return per_phase_[static_cast<int>(p)]; }

  /// Reserve one query for the given phase; false once the budget is spent.
  bool try_consume(Phase p) {
    if (used_ >= budget_) return false;
    ++used_;
    ++per_phase_[static_cast<int>(p)];
    return true;
  }

 private:
  long budget_ = 0;
  long used_ = 0;
  std::array<long, 3> per_phase_{0, 0, 0};
};

struct Observation {
  enum class Status { Value, Infeasible, BudgetExhausted };
  Status status = Status::Value;
  double y = 0.0;

  bool is_value() const { return status == Status::Value; }
  bool infeasible() const { return status == Status::Infeasible; }
  bool exhausted() const { return status == Status::BudgetExhausted; }
};

/// One noisy query. Consumes one budget unit unless the ledger is exhausted,
/// in which case BudgetExhausted is returned without evaluating. Infeasible
/// points pass through the noise channel untouched.
Observation query(const ProblemSpec& spec, const NoiseModel& noise, const Vec& x,
                  Phase phase, QueryLedger& ledger, RngStream& rng);

const char* objective_name(ObjectiveId id);
std::optional<ObjectiveId> objective_from_name(const std::string& name);
std::optional<NoiseModel::Kind> noise_from_name(const std::string& name);
const char* noise_name(NoiseModel::Kind kind);

}  // namespace gravicut
