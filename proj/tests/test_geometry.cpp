#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gravicut/geometry.hpp"

using namespace gravicut;

namespace {

Vec vec2(double a, double b) { return Eigen::Vector2d(a, b); }

Mat empirical_cov(const std::vector<Vec>& xs) {
  const int d = static_cast<int>(xs[0].size());
  Vec mu = Vec::Zero(d);
  for (const Vec& x : xs) mu += x;
  mu /= static_cast<double>(xs.size());
  Mat cov = Mat::Zero(d, d);
  for (const Vec& x : xs) {
    Vec c = x - mu;
    cov += c * c.transpose();
  }
  return cov / static_cast<double>(xs.size() - 1);
}

}  // namespace

TEST_CASE("chord on a symmetric box") {
  ConvexBody body{Box::cube(2, -1.0, 1.0)};
  Chord c = body.chord(vec2(0, 0), vec2(1, 0));
  CHECK(c.t_lo == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(c.t_hi == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chord truncated by a cut") {
  std::vector<Halfspace> cuts{Halfspace(vec2(1, 0), 0.0)};  // x1 <= 0
  ConvexBody body{Box::cube(2, -1.0, 1.0), cuts, vec2(-0.5, 0)};
  Chord c = body.chord(vec2(-0.5, 0), vec2(1, 0));
  CHECK(c.t_lo == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(c.t_hi == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("chord along the diagonal of [0,2]^2") {
  // From (1,1) along (1,1)/sqrt(2): the corners sit at distance sqrt(2).
  ConvexBody body{Box::cube(2, 0.0, 2.0)};
  double s = 1.0 / std::sqrt(2.0);
  Chord c = body.chord(vec2(1, 1), vec2(s, s));
  CHECK(c.t_lo == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(c.t_hi == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("chord rejects exterior points and zero directions") {
  ConvexBody body{Box::cube(2, -1.0, 1.0)};
  CHECK_THROWS_AS(body.chord(vec2(2, 0), vec2(1, 0)), NotInterior);
  CHECK_THROWS_AS(body.chord(vec2(0, 0), vec2(0, 0)), std::invalid_argument);
}

TEST_CASE("chord endpoints sit on the boundary") {
  RngStream rng(7);
  ConvexBody body{Box::cube(3, -1.0, 1.0)};
  std::vector<Halfspace> cuts{
      Halfspace(Vec(Eigen::Vector3d(1, 1, 0).normalized()), 0.3)};
  body = ConvexBody(body.base(), cuts, Vec::Zero(3));
  for (int i = 0; i < 200; ++i) {
    Vec u = random_unit_vector(3, rng);
    Chord c = body.chord(body.witness(), u);
    Vec mid = body.witness() + 0.5 * (c.t_lo + c.t_hi) * u;
    CHECK(body.contains(mid));
    CHECK_FALSE(body.contains(body.witness() + (c.t_hi + 1e-6) * u));
    CHECK_FALSE(body.contains(body.witness() + (c.t_lo - 1e-6) * u));
    sample_interior(body, 1, 0, rng);  // move the witness around
  }
}

TEST_CASE("hit-and-run mean on a centered box") {
  RngStream rng(11);
  ConvexBody body{Box::cube(3, -1.0, 1.0)};
  std::vector<Vec> xs = sample_interior(body, 10000, 300, rng);
  Vec mu = Vec::Zero(3);
  for (const Vec& x : xs) mu += x;
  mu /= static_cast<double>(xs.size());
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mu[k]) < 0.05);
}

TEST_CASE("single sample satisfies membership and replaces the witness") {
  RngStream rng(12);
  ConvexBody body{Box::cube(2, -1.0, 1.0)};
  std::vector<Vec> xs = sample_interior(body, 1, 0, rng);
  CHECK(xs.size() == 1);
  CHECK(body.contains(xs[0]));
  CHECK(body.witness() == xs[0]);
}

TEST_CASE("hit-and-run centroid of a triangle") {
  // Box [0,1]^2 cut by x1 + x2 <= 1; centroid is (1/3, 1/3).
  RngStream rng(13);
  std::vector<Halfspace> cuts{Halfspace(vec2(1, 1), 1.0)};
  ConvexBody body{Box::cube(2, 0.0, 1.0), cuts, vec2(0.25, 0.25)};
  std::vector<Vec> xs = sample_interior(body, 20000, 200, rng);
  Vec mu = Vec::Zero(2);
  for (const Vec& x : xs) mu += x;
  mu /= static_cast<double>(xs.size());
  CHECK(std::abs(mu[0] - 1.0 / 3.0) < 0.05);
  CHECK(std::abs(mu[1] - 1.0 / 3.0) < 0.05);
}

TEST_CASE("frame of a centered box: sqrt_cov is I/sqrt(3)") {
  RngStream rng(14);
  ConvexBody body{Box::cube(2, -1.0, 1.0)};
  IsotropicFrame f = estimate_frame(body, 8000, rng);
  const double s = 1.0 / std::sqrt(3.0);  // uniform on [-1,1] has variance 1/3
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(f.mu[i]) < 0.05);
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(f.sqrt_cov(i, j) - (i == j ? s : 0.0)) < 0.05);
  }
  // invariants: symmetry and inverse consistency
  CHECK((f.sqrt_cov - f.sqrt_cov.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((f.sqrt_cov * f.inv_sqrt_cov - Mat::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("whitening is idempotent in distribution") {
  RngStream rng(15);
  ConvexBody body{Box::cube(3, -0.5, 2.0)};
  IsotropicFrame f = estimate_frame(body, 12000, rng);
  std::vector<Vec> fresh = sample_interior(body, 12000, 300, rng);
  for (Vec& x : fresh) x = f.whiten(x);
  Vec mu = Vec::Zero(3);
  for (const Vec& x : fresh) mu += x;
  mu /= static_cast<double>(fresh.size());
  CHECK(mu.norm() < 0.05);
  Mat cov = empirical_cov(fresh);
  // whitened covariance is identity / d
  CHECK((cov - Mat::Identity(3, 3) / 3.0).norm() < 0.05);
}

TEST_CASE("whitening soundness on a cut body") {
  RngStream rng(16);
  std::vector<Halfspace> cuts{
      Halfspace(Vec(Eigen::Vector3d(1, 2, 0).normalized()), 0.4),
      Halfspace(Vec(Eigen::Vector3d(-1, 0.5, 1).normalized()), 0.6)};
  ConvexBody body{Box::cube(3, -1.0, 1.0), cuts, Vec::Zero(3)};
  IsotropicFrame f = estimate_frame(body, 10000, rng);
  std::vector<Vec> fresh = sample_interior(body, 10000, 300, rng);
  std::vector<Vec> mapped;
  mapped.reserve(fresh.size());
  for (const Vec& x : fresh) mapped.push_back(f.whiten(x));
  Vec mu = Vec::Zero(3);
  for (const Vec& z : mapped) mu += z;
  mu /= static_cast<double>(mapped.size());
  CHECK(mu.norm() <= 0.05);
  Mat cov = empirical_cov(mapped);
  Eigen::SelfAdjointEigenSolver<Mat> eig(cov - Mat::Identity(3, 3) / 3.0);
  CHECK(eig.eigenvalues().cwiseAbs().maxCoeff() <= 0.1);

  // KLS-style containment with estimation slack
  double bound = 2.0 * std::sqrt(3.0) * 1.1;
  for (const Vec& z : mapped) CHECK(z.norm() <= bound);
}

TEST_CASE("near-flat box raises DegenerateBody") {
  RngStream rng(17);
  Box box(vec2(-1.0, -0.5e-9), vec2(1.0, 0.5e-9));
  ConvexBody body{box};
  CHECK_THROWS_AS(estimate_frame(body, 4000, rng), DegenerateBody);
}

TEST_CASE("frame estimation enforces the sample-count floor") {
  RngStream rng(18);
  ConvexBody body{Box::cube(2, -1.0, 1.0)};
  CHECK_THROWS_AS(estimate_frame(body, 10, rng), std::invalid_argument);
}

TEST_CASE("apply_cut in one dimension keeps the sign side") {
  RngStream rng(19);
  ConvexBody body{Box::cube(1, -1.0, 1.0)};
  IsotropicFrame f;
  f.dim = 1;
  f.mu = Vec::Zero(1);
  f.sqrt_cov = Mat::Identity(1, 1);
  f.inv_sqrt_cov = Mat::Identity(1, 1);
  ConvexBody cut = apply_cut(body, f, Vec::Zero(1), Vec::Ones(1), rng);
  Vec inside(1), outside(1);
  inside << -0.5;
  outside << 0.5;
  CHECK(cut.contains(inside));
  CHECK_FALSE(cut.contains(outside));
}

TEST_CASE("apply_cut closed form in two dimensions") {
  // Identity frame, z = (0.1, 0), gradient e1: kept set is x1 <= 0.1*sqrt(2).
  RngStream rng(20);
  ConvexBody body{Box::cube(2, -1.0, 1.0)};
  IsotropicFrame f;
  f.dim = 2;
  f.mu = Vec::Zero(2);
  f.sqrt_cov = Mat::Identity(2, 2);
  f.inv_sqrt_cov = Mat::Identity(2, 2);
  ConvexBody cut = apply_cut(body, f, vec2(0.1, 0.0), vec2(1.0, 0.0), rng);
  CHECK(cut.contains(vec2(0, 0)));
  CHECK_FALSE(cut.contains(vec2(1, 0)));
  CHECK(cut.contains(vec2(0.1 * std::sqrt(2.0) - 1e-9, 0)));
  CHECK_FALSE(cut.contains(vec2(0.1 * std::sqrt(2.0) + 1e-9, 0)));
}

TEST_CASE("apply_cut rejects a zero gradient") {
  RngStream rng(21);
  ConvexBody body{Box::cube(2, -1.0, 1.0)};
  IsotropicFrame f = IsotropicFrame::identity_map(2);
  CHECK_THROWS_AS(apply_cut(body, f, Vec::Zero(2), Vec::Zero(2), rng),
                  std::invalid_argument);
}

TEST_CASE("apply_cut recovers a witness across the cut") {
  // Cut away the current witness; the kept side is still half the box.
  RngStream rng(22);
  ConvexBody body{Box::cube(2, -1.0, 1.0), {}, vec2(0.9, 0.0)};
  IsotropicFrame f = IsotropicFrame::identity_map(2);
  ConvexBody cut = apply_cut(body, f, Vec::Zero(2), vec2(1.0, 0.0), rng);
  CHECK(cut.contains(cut.witness()));
  CHECK(cut.witness()[0] < 0.0);
}

TEST_CASE("a cut with an empty kept side raises EmptyCut") {
  // Halfspace x1 <= -5 sqrt(2) has no intersection with the box.
  RngStream rng(27);
  ConvexBody body{Box::cube(2, -1.0, 1.0)};
  IsotropicFrame f = IsotropicFrame::identity_map(2);
  Vec z(2);
  z << -5.0, 0.0;
  CHECK_THROWS_AS(apply_cut(body, f, z, vec2(1.0, 0.0), rng), EmptyCut);
}

TEST_CASE("volume fraction of identical bodies is one") {
  RngStream rng(23);
  ConvexBody body{Box::cube(2, -1.0, 1.0)};
  CHECK(estimate_volume_fraction(body, body, 2000, rng) == 1.0);
}

TEST_CASE("volume fraction of half and quarter cuts") {
  RngStream rng(24);
  ConvexBody body{Box::cube(2, -1.0, 1.0)};

  std::vector<Halfspace> half{Halfspace(vec2(1, 0), 0.0)};
  ConvexBody body_half{body.base(), half, vec2(-0.5, 0)};
  double f_half = estimate_volume_fraction(body_half, body, 10000, rng);
  CHECK(std::abs(f_half - 0.5) < 0.03);

  std::vector<Halfspace> quarter{Halfspace(vec2(1, 0), -0.5)};
  ConvexBody body_quarter{body.base(), quarter, vec2(-0.75, 0)};
  double f_quarter = estimate_volume_fraction(body_quarter, body, 10000, rng);
  CHECK(std::abs(f_quarter - 0.25) < 0.03);
}

TEST_CASE("volume fraction rejects non-extending bodies") {
  RngStream rng(25);
  ConvexBody a{Box::cube(2, -1.0, 1.0)};
  std::vector<Halfspace> cuts{Halfspace(vec2(1, 0), 0.0)};
  ConvexBody b{a.base(), cuts, vec2(-0.5, 0)};
  CHECK_THROWS_AS(estimate_volume_fraction(a, b, 100, rng), std::invalid_argument);
}

TEST_CASE("near-barycentric cuts keep both sides nontrivial") {
  // Random cut boxes, whitened cut points with |z| <= 1/(4e sqrt(d)),
  // arbitrary directions: neither side collapses.
  RngStream rng(26);
  for (int rep = 0; rep < 12; ++rep) {
    int dim = 2 + static_cast<int>(rng.next_u64() % 2);
    Vec lo(dim), hi(dim);
    for (int k = 0; k < dim; ++k) {
      lo[k] = -rng.uniform(0.3, 1.5);
      hi[k] = rng.uniform(0.3, 1.5);
    }
    ConvexBody body{Box(lo, hi)};
    IsotropicFrame f = estimate_frame(body, frame_sample_count(dim), rng);
    double cap = 1.0 / (4.0 * std::exp(1.0) * std::sqrt(static_cast<double>(dim)));
    Vec z = (cap * rng.uniform01()) * random_unit_vector(dim, rng);
    ConvexBody cut = apply_cut(body, f, z, random_unit_vector(dim, rng), rng);
    double kept = estimate_volume_fraction(cut, body, 20000, rng);
    CHECK(kept >= 0.10);
    CHECK(kept <= 0.90);
  }
}

TEST_CASE("witness invariants on construction") {
  CHECK_THROWS_AS(
      ConvexBody(Box::cube(2, -1.0, 1.0),
                 {Halfspace(vec2(1, 0), -0.5)}, vec2(0.5, 0.0)),
      NotInterior);
  CHECK_THROWS_AS(Box(vec2(0, 0), vec2(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(Halfspace(vec2(0, 0), 1.0), std::invalid_argument);
}

TEST_CASE("identical seeds give identical samples and frames") {
  ConvexBody b1{Box::cube(2, -1.0, 1.0)};
  ConvexBody b2{Box::cube(2, -1.0, 1.0)};
  RngStream r1(99), r2(99);
  std::vector<Vec> s1 = sample_interior(b1, 50, 10, r1);
  std::vector<Vec> s2 = sample_interior(b2, 50, 10, r2);
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i] == s2[i]);
  IsotropicFrame f1 = estimate_frame(b1, 2000, r1);
  IsotropicFrame f2 = estimate_frame(b2, 2000, r2);
  CHECK(f1.mu == f2.mu);
  CHECK(f1.sqrt_cov == f2.sqrt_cov);
}
