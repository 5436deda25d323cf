#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gravicut/rng.hpp"

namespace gravicut {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct NotInterior : std::runtime_error {
  explicit NotInterior(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateBody : std::runtime_error {
  explicit DegenerateBody(const std::string& what) : std::runtime_error(what) {}
};
struct EmptyCut : std::runtime_error {
  explicit EmptyCut(const std::string& what) : std::runtime_error(what) {}
};

/// Closed halfspace { x : <normal, x> <= offset }. The normal must be nonzero.
struct Halfspace {
  Vec normal;
  double offset = 0.0;

  Halfspace() = default;
  Halfspace(Vec n, double b) : normal(std::move(n)), offset(b) {
    if (normal.norm() == 0.0) throw std::invalid_argument("halfspace normal is zero");
  }

  double margin(const Vec& x) const { return offset - normal.dot(x); }
  bool contains(const Vec& x) const { return margin(x) >= 0.0; }
};

/// Axis-aligned box given by per-coordinate bounds, lo < hi componentwise.
struct Box {
  Vec lo, hi;

  Box() = default;
  Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size() || lo.size() == 0)
      throw std::invalid_argument("box bounds have mismatched dimension");
    for (Eigen::Index k = 0; k < lo.size(); ++k)
      if (!(lo[k] < hi[k])) throw std::invalid_argument("box side is empty");
  }
  static Box cube(int dim, double lo, double hi) {
    return Box(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
  }

  int dim() const { return static_cast<int>(lo.size()); }
  Vec center() const { return 0.5 * (lo + hi); }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Vec& x) const {
    for (Eigen::Index k = 0; k < lo.size(); ++k)
      if (x[k] < lo[k] || x[k] > hi[k]) return false;
    return true;
  }
};

/// Interval of chord parameters t with point + t * direction inside a body.
struct Chord {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// A convex body: an axis-aligned base box intersected with an ordered list
/// of halfspace cuts, plus a tracked interior witness point.
///
/// The witness is refreshed by the sampling routines; every stored witness
/// satisfies the box bounds and all cuts.
class ConvexBody {
 public:
  explicit ConvexBody(Box base)
      : base_(std::move(base)), witness_(base_.center()) {}

  ConvexBody(Box base, std::vector<Halfspace> cuts, Vec witness);

  int dim() const { return base_.dim(); }
  const Box& base() const { return base_; }
  const std::vector<Halfspace>& cuts() const { return cuts_; }
  const Vec& witness() const { return witness_; }

  bool contains(const Vec& x) const {
    if (!base_.contains(x)) return false;
    for (const auto& h : cuts_)
      if (!h.contains(x)) return false;
    return true;
  }

  bool contains_strict(const Vec& x) const {
    for (Eigen::Index k = 0; k < x.size(); ++k)
      if (!(base_.lo[k] < x[k] && x[k] < base_.hi[k])) return false;
    for (const auto& h : cuts_)
      if (!(h.margin(x) > 0.0)) return false;
    return true;
  }

  /// Chord of the body through `point` along `direction` in closed form from
  /// the box bounds and the cut halfspaces. Requires membership of `point`;
  /// margins within a small slack of the boundary are treated as zero so the
  /// samplers stay robust on near-degenerate bodies.
  Chord chord(const Vec& point, const Vec& direction) const;

  /// Used by the samplers; requires membership up to boundary slack.
  void set_witness(Vec w);

 private:
  Box base_;
  std::vector<Halfspace> cuts_;
  Vec witness_;
};

/// Whitening frame built from an estimated barycenter and covariance:
/// whiten(x) = inv_sqrt_cov * (x - mu) / sqrt(d),
/// unwhiten(z) = sqrt(d) * sqrt_cov * z + mu.
struct IsotropicFrame {
  Vec mu;
  Mat sqrt_cov;
  Mat inv_sqrt_cov;
  int dim = 0;

  Vec whiten(const Vec& x) const {
    return (inv_sqrt_cov * (x - mu)) / std::sqrt(static_cast<double>(dim));
  }
  Vec unwhiten(const Vec& z) const {
    return std::sqrt(static_cast<double>(dim)) * (sqrt_cov * z) + mu;
  }

  /// Frame whose whiten/unwhiten maps are the identity (for tests and
  /// estimator-level work in unscaled coordinates).
  static IsotropicFrame identity_map(int dim);
};

/// Hit-and-run iterates started at the stored witness. The first `burn_in`
/// steps are discarded; the last iterate replaces the witness.
std::vector<Vec> sample_interior(ConvexBody& body, long count, long burn_in,
                                 RngStream& rng);

/// Default sampling effort for frame estimation. Frame estimation is
/// oracle-free: it consumes geometry samples, never objective queries.
inline long frame_sample_count(int dim) {
  long d = dim;
  return std::max<long>(2000, 50 * d * d);
}
inline long frame_burn_in(int dim) { return 100L * dim; }

/// Estimate the whitening frame of a body from `sample_count` hit-and-run
/// draws (requires sample_count >= 10 d^2). Covariance eigenvalues are
/// floored at 1e-10 times the largest; a raw condition number above 1e12
/// raises DegenerateBody.
IsotropicFrame estimate_frame(ConvexBody& body, long sample_count, RngStream& rng);

/// Append the halfspace expressing <whiten(x) - z, gradient> <= 0 in original
/// coordinates and refresh the witness inside the kept side. Raises EmptyCut
/// if no interior witness is found after the retry policy.
ConvexBody apply_cut(const ConvexBody& body, const IsotropicFrame& frame,
                     const Vec& z, const Vec& gradient, RngStream& rng);

/// Fraction of `sample_count` draws from `before` that land in `after`.
/// Requires `after` to extend `before` by additional cuts only.
double estimate_volume_fraction(const ConvexBody& after, const ConvexBody& before,
                                long sample_count, RngStream& rng);

/// Gaussian direction on the unit sphere.
Vec random_unit_vector(int dim, RngStream& rng);

}  // namespace gravicut
