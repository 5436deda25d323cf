#include "gravicut/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace gravicut {

namespace {

// Boundary slack for chord computations. Margins in [-kBoundarySlack, 0) are
// treated as exactly zero so the walk does not abort on points that rounding
// pushed marginally outside; anything further out is a genuine violation.
constexpr double kBoundarySlack = 1e-9;

// Tighten the chord interval with a linear constraint coeff * t <= margin.
void clip_interval(double coeff, double margin, double& t_lo, double& t_hi) {
  if (coeff > 0.0) {
    t_hi = std::min(t_hi, margin / coeff);
  } else if (coeff < 0.0) {
    t_lo = std::max(t_lo, margin / coeff);
  }
  // coeff == 0: constraint holds for all t given margin >= 0.
}

}  // namespace

ConvexBody::ConvexBody(Box base, std::vector<Halfspace> cuts, Vec witness)
    : base_(std::move(base)), cuts_(std::move(cuts)), witness_(base_.center()) {
  set_witness(std::move(witness));
}

Chord ConvexBody::chord(const Vec& point, const Vec& direction) const {
  if (direction.norm() == 0.0)
    throw std::invalid_argument("chord direction is zero");

  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();

  for (Eigen::Index k = 0; k < point.size(); ++k) {
    double m_hi = base_.hi[k] - point[k];
    double m_lo = point[k] - base_.lo[k];
    if (m_hi < 0.0 || m_lo < 0.0) {
      if (m_hi < -kBoundarySlack || m_lo < -kBoundarySlack)
        throw NotInterior("chord start violates box bounds");
      m_hi = std::max(m_hi, 0.0);
      m_lo = std::max(m_lo, 0.0);
    }
    clip_interval(direction[k], m_hi, t_lo, t_hi);
    clip_interval(-direction[k], m_lo, t_lo, t_hi);
  }
  for (const auto& h : cuts_) {
    double m = h.margin(point);
    if (m < 0.0) {
      if (m < -kBoundarySlack * (1.0 + std::abs(h.offset)))
        throw NotInterior("chord start violates a cut");
      m = 0.0;
    }
    clip_interval(h.normal.dot(direction), m, t_lo, t_hi);
  }

  // Rounding can cross the endpoints on thin bodies; pin them around zero.
  t_lo = std::min(t_lo, 0.0);
  t_hi = std::max(t_hi, 0.0);
  return {t_lo, t_hi};
}

void ConvexBody::set_witness(Vec w) {
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (w[k] < base_.lo[k] - kBoundarySlack || w[k] > base_.hi[k] + kBoundarySlack)
      throw NotInterior("witness outside box");
  for (const auto& h : cuts_)
    if (h.margin(w) < -kBoundarySlack * (1.0 + std::abs(h.offset)))
      throw NotInterior("witness outside a cut");
  witness_ = std::move(w);
}

Vec random_unit_vector(int dim, RngStream& rng) {
  Vec g(dim);
  double n = 0.0;
  do {
    for (int k = 0; k < dim; ++k) g[k] = rng.normal();
    n = g.norm();
  } while (n == 0.0);
  return g / n;
}

namespace {

// Hit-and-run with an optional direction-shaping matrix. Any full-support
// direction distribution leaves the uniform law stationary; shaping by an
// estimated covariance square root keeps the walk mixing on elongated
// bodies.
std::vector<Vec> walk_interior(ConvexBody& body, long count, long burn_in,
                               RngStream& rng, const Mat* shape) {
  if (count <= 0) throw std::invalid_argument("sample count must be positive");
  if (burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");

  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  Vec x = body.witness();
  const int d = body.dim();
  for (long step = 0; step < burn_in + count; ++step) {
    // Mixture kernel: coordinate directions mix elongated axis-aligned
    // bodies that sphere directions alone traverse too slowly.
    Vec u;
    if (rng.uniform01() < 0.5) {
      u = Vec::Zero(d);
      u[static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(d))] = 1.0;
    } else {
      u = random_unit_vector(d, rng);
    }
    if (shape) {
      Vec su = (*shape) * u;
      double n = su.norm();
      if (n > 0.0) u = su / n;
    }
    Chord c = body.chord(x, u);
    double t = rng.uniform(c.t_lo, c.t_hi);
    x += t * u;
    if (step >= burn_in) out.push_back(x);
  }
  body.set_witness(x);
  return out;
}

}  // namespace

std::vector<Vec> sample_interior(ConvexBody& body, long count, long burn_in,
                                 RngStream& rng) {
  return walk_interior(body, count, burn_in, rng, nullptr);
}

IsotropicFrame IsotropicFrame::identity_map(int dim) {
  IsotropicFrame f;
  f.dim = dim;
  f.mu = Vec::Zero(dim);
  double s = std::sqrt(static_cast<double>(dim));
  f.sqrt_cov = Mat::Identity(dim, dim) / s;
  f.inv_sqrt_cov = Mat::Identity(dim, dim) * s;
  return f;
}

namespace {

struct Moments {
  Vec mu;
  Mat cov;
};

Moments moments_of(const std::vector<Vec>& draws, int d) {
  Moments m;
  m.mu = Vec::Zero(d);
  for (const Vec& x : draws) m.mu += x;
  m.mu /= static_cast<double>(draws.size());
  m.cov = Mat::Zero(d, d);
  for (const Vec& x : draws) {
    Vec c = x - m.mu;
    m.cov += c * c.transpose();
  }
  m.cov /= static_cast<double>(draws.size() - 1);
  return m;
}

}  // namespace

IsotropicFrame estimate_frame(ConvexBody& body, long sample_count, RngStream& rng) {
  const int d = body.dim();
  if (sample_count < 10L * d * d)
    throw std::invalid_argument("frame estimation needs at least 10 d^2 samples");

  // Pass 1: a pilot walk estimates a crude shape of the body. Pass 2 draws
  // the walk directions through that shape, which keeps the chain mixing on
  // sliver-like bodies; the returned moments come from the second pass.
  long pilot = std::max(10L * d * d, sample_count / 4);
  Moments crude = moments_of(
      walk_interior(body, pilot, frame_burn_in(d), rng, nullptr), d);
  Mat shape = Mat::Identity(d, d);
  {
    Eigen::SelfAdjointEigenSolver<Mat> eig(crude.cov);
    double lambda_max = eig.eigenvalues().maxCoeff();
    if (lambda_max > 0.0 && std::isfinite(lambda_max)) {
      Vec sq(d);
      for (int k = 0; k < d; ++k)
        sq[k] = std::sqrt(std::max(eig.eigenvalues()[k], 1e-10 * lambda_max));
      shape = eig.eigenvectors() * sq.asDiagonal() * eig.eigenvectors().transpose();
    }
  }
  Moments m = moments_of(
      walk_interior(body, sample_count, frame_burn_in(d), rng, &shape), d);

  Eigen::SelfAdjointEigenSolver<Mat> eig(m.cov);
  Vec lambda = eig.eigenvalues();
  double lambda_max = lambda.maxCoeff();
  double lambda_min = lambda.minCoeff();
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max))
    throw DegenerateBody("covariance has no positive eigenvalue");
  if (lambda_min < 1e-12 * lambda_max)
    throw DegenerateBody("covariance condition number exceeds 1e12");

  const double floor = 1e-10 * lambda_max;
  Vec sq(d), inv_sq(d);
  for (int k = 0; k < d; ++k) {
    double l = std::max(lambda[k], floor);
    sq[k] = std::sqrt(l);
    inv_sq[k] = 1.0 / sq[k];
  }
  const Mat& v = eig.eigenvectors();

  IsotropicFrame frame;
  frame.dim = d;
  frame.mu = std::move(m.mu);
  frame.sqrt_cov = v * sq.asDiagonal() * v.transpose();
  frame.inv_sqrt_cov = v * inv_sq.asDiagonal() * v.transpose();
  // Symmetrize away the last bits of asymmetry from the triple product.
  frame.sqrt_cov = 0.5 * (frame.sqrt_cov + frame.sqrt_cov.transpose()).eval();
  frame.inv_sqrt_cov = 0.5 * (frame.inv_sqrt_cov + frame.inv_sqrt_cov.transpose()).eval();
  return frame;
}

ConvexBody apply_cut(const ConvexBody& body, const IsotropicFrame& frame,
                     const Vec& z, const Vec& gradient, RngStream& rng) {
  if (gradient.norm() == 0.0)
    throw std::invalid_argument("cut gradient is zero");

  const double root_d = std::sqrt(static_cast<double>(body.dim()));
  Vec w = (frame.inv_sqrt_cov * gradient) / root_d;
  double offset = w.dot(frame.mu) + gradient.dot(z);
  Halfspace cut(w, offset);

  std::vector<Halfspace> cuts = body.cuts();
  cuts.push_back(cut);

  Vec w0 = body.witness();
  Vec witness;
  if (cut.margin(w0) > 0.0) {
    witness = w0;
  } else {
    // Recover a witness on the kept side: walk chords of the old body from
    // the old witness and take the midpoint of the feasible sub-segment.
    // Directions are shaped by the body covariance so the chords traverse a
    // sliver along its long axes; the first attempt heads straight for the
    // cut plane in the shaped metric.
    bool found = false;
    for (int attempt = 0; attempt < 50 && !found; ++attempt) {
      Vec u = (attempt == 0)
                  ? Vec(-(frame.sqrt_cov * (frame.sqrt_cov * w)))
                  : Vec(frame.sqrt_cov * random_unit_vector(body.dim(), rng));
      double un = u.norm();
      if (un == 0.0) continue;
      u /= un;
      Chord c = body.chord(w0, u);
      double a = w.dot(u);
      double m = cut.margin(w0);  // <= 0 here
      if (a < 0.0) {
        double t_cross = m / a;
        if (t_cross < c.t_hi) {
          witness = w0 + 0.5 * (t_cross + c.t_hi) * u;
          found = true;
        }
      } else if (a > 0.0) {
        double t_cross = m / a;
        if (t_cross > c.t_lo) {
          witness = w0 + 0.5 * (c.t_lo + t_cross) * u;
          found = true;
        }
      }
      if (found && !(cut.margin(witness) >= 0.0 && body.contains(witness))) {
        found = false;
      }
    }
    if (!found) throw EmptyCut("no interior witness on the kept side");
  }

  ConvexBody result(body.base(), std::move(cuts), std::move(witness));
  // Decorrelate the witness from the cut boundary.
  sample_interior(result, 1, 2L * body.dim(), rng);
  return result;
}

double estimate_volume_fraction(const ConvexBody& after, const ConvexBody& before,
                                long sample_count, RngStream& rng) {
  if (after.cuts().size() < before.cuts().size())
    throw std::invalid_argument("after must extend before");
  if (after.base().lo != before.base().lo || after.base().hi != before.base().hi)
    throw std::invalid_argument("bodies have different bases");
  for (std::size_t i = 0; i < before.cuts().size(); ++i) {
    if (after.cuts()[i].normal != before.cuts()[i].normal ||
        after.cuts()[i].offset != before.cuts()[i].offset)
      throw std::invalid_argument("after does not extend before's cuts");
  }

  ConvexBody scratch = before;
  std::vector<Vec> draws =
      sample_interior(scratch, sample_count, frame_burn_in(before.dim()), rng);
  long kept = 0;
  for (const Vec& x : draws)
    if (after.contains(x)) ++kept;
  return static_cast<double>(kept) / static_cast<double>(draws.size());
}

}  // namespace gravicut
