#include "gravicut/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gravicut/smoothing.hpp"

namespace gravicut {

namespace {

constexpr double kStarPattern[6] = {0.3, -0.25, 0.15, -0.1, 0.2, -0.05};

Vec pattern_point(int dim, double scale) {
  Vec x(dim);
  for (int k = 0; k < dim; ++k) x[k] = scale * kStarPattern[k % 6];
  return x;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Noiseless Monte-Carlo estimate of the ball-smoothed value at z (identity
// frame coordinates), with its standard error. Test-oracle path: bypasses the
// query/ledger pipeline entirely.
struct McValue {
  double mean = 0.0;
  double se = 0.0;
};

McValue mc_smoothed_value(const ProblemSpec& spec, const Vec& z, double c,
                          long samples, RngStream& rng) {
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < samples; ++i) {
    Vec x = c > 0.0 ? Vec(z + sample_ball(static_cast<int>(z.size()), c, rng)) : z;
    std::optional<double> f = spec.evaluate(x);
    double y = f ? *f : 1.0;
    sum += y;
    sum_sq += y * y;
  }
  double m = sum / static_cast<double>(samples);
  double var = std::max(0.0, sum_sq / static_cast<double>(samples) - m * m);
  return {m, std::sqrt(var / static_cast<double>(samples))};
}

// Random box around the origin with side positions in [0.2, 2].
Box random_box(int dim, RngStream& rng) {
  Vec lo(dim), hi(dim);
  for (int k = 0; k < dim; ++k) {
    lo[k] = -rng.uniform(0.2, 2.0);
    hi[k] = rng.uniform(0.2, 2.0);
  }
  return Box(std::move(lo), std::move(hi));
}

// Add a random halfspace cut through an interior point, keeping the side of
// a second interior point.
ConvexBody random_cut(ConvexBody body, RngStream& rng) {
  Vec p = sample_interior(body, 1, 20, rng)[0];
  Vec w2 = sample_interior(body, 1, 20, rng)[0];
  for (int attempt = 0; attempt < 32; ++attempt) {
    Vec n = random_unit_vector(body.dim(), rng);
    double side = n.dot(w2 - p);
    if (side == 0.0) continue;
    if (side > 0.0) n = -n;
    std::vector<Halfspace> cuts = body.cuts();
    cuts.emplace_back(n, n.dot(p));
    return ConvexBody(body.base(), std::move(cuts), w2);
  }
  return body;
}

}  // namespace

PropertyResult check_value_concentration(const ValueConcentrationParams& p,
                                         std::uint64_t seed) {
  RngStream rng = RngStream::derive(seed, {101});
  Box box = Box::cube(p.dim, -1.0, 1.0);
  double q = 0.9 / static_cast<double>(p.dim);
  ProblemSpec spec = make_quadratic(box, Vec::Zero(p.dim), q);
  // Evaluate where the value sits well inside (0,1): Bernoulli noise is near
  // its worst there, so the check is sensitive to a broken width.
  Vec z = pattern_point(p.dim, 2.8);
  IsotropicFrame frame = IsotropicFrame::identity_map(p.dim);

  McValue ref = mc_smoothed_value(spec, z, p.c, p.ref_samples, rng);
  const double bound = p.eta_scale * eta_conc(1.0 / p.delta) /
                       std::sqrt(static_cast<double>(p.n_samples));

  int covered = 0;
  NoiseModel noise = NoiseModel::bernoulli();
  for (int t = 0; t < p.trials; ++t) {
    QueryLedger ledger(p.n_samples);
    SmoothedQuery sq{frame, z, p.c, p.n_samples, Phase::Fcp};
    ValueEstimate est = estimate_value(sq, spec, noise, ledger, rng);
    if (std::abs(est.value - ref.mean) <= bound) ++covered;
  }
  double coverage = static_cast<double>(covered) / p.trials;
  double target = 1.0 - p.delta;
  double three_sigma = 3.0 * std::sqrt(target * p.delta / p.trials);
  bool pass = coverage >= target - three_sigma;

  std::ostringstream d;
  d << "coverage " << covered << "/" << p.trials << " (" << fmt(coverage)
    << ", need >= " << fmt(target - three_sigma) << "), bound " << fmt(bound)
    << ", ref " << fmt(ref.mean) << " +- " << fmt(ref.se);
  return {"value-estimator-concentration", pass, d.str()};
}

PropertyResult check_gradient_concentration(const GradientConcentrationParams& p,
                                            std::uint64_t seed) {
  RngStream rng = RngStream::derive(seed, {102});
  Box box = Box::cube(p.dim, -1.0, 1.0);
  double q = 0.9 / static_cast<double>(p.dim);
  ProblemSpec spec = make_quadratic(box, Vec::Zero(p.dim), q);
  Vec z = pattern_point(p.dim, 2.8);
  IsotropicFrame frame = IsotropicFrame::identity_map(p.dim);

  // Smoothing a pure quadratic leaves the gradient unchanged.
  Vec grad_ref = 2.0 * q * z;
  double min_n = p.dim * std::log(2.0 / p.delta);
  if (static_cast<double>(p.n_samples) < min_n)
    return {"gradient-estimator-concentration", false,
            "sample count below d log(2/delta)"};

  const double bound = p.eta_scale * eta_conc(1.0 / p.delta) *
                       std::sqrt(static_cast<double>(p.dim)) /
                       (p.c * std::sqrt(static_cast<double>(p.n_samples)));

  int covered = 0;
  NoiseModel noise = NoiseModel::bernoulli();
  for (int t = 0; t < p.trials; ++t) {
    Vec u = random_unit_vector(p.dim, rng);
    QueryLedger ledger(p.n_samples);
    SmoothedQuery sq{frame, z, p.c, p.n_samples, Phase::Gradient};
    GradientEstimate est = estimate_gradient(sq, spec, noise, ledger, rng);
    if (std::abs((est.gradient - grad_ref).dot(u)) <= bound) ++covered;
  }
  double coverage = static_cast<double>(covered) / p.trials;
  double target = 1.0 - p.delta;
  double three_sigma = 3.0 * std::sqrt(target * p.delta / p.trials);
  bool pass = coverage >= target - three_sigma;

  std::ostringstream d;
  d << "coverage " << covered << "/" << p.trials << " (" << fmt(coverage)
    << ", need >= " << fmt(target - three_sigma) << "), bound " << fmt(bound);
  return {"gradient-estimator-concentration", pass, d.str()};
}

PropertyResult check_stokes(const StokesParams& p, std::uint64_t seed) {
  RngStream rng = RngStream::derive(seed, {103});
  Box box = Box::cube(p.dim, -1.0, 1.0);
  double q = 0.9 / static_cast<double>(p.dim);
  ProblemSpec spec = make_quadratic(box, Vec::Zero(p.dim), q);
  Vec z = p.dim == 2 ? Vec(Eigen::Vector2d(0.3, 0.0)) : pattern_point(p.dim, 2.0);
  IsotropicFrame frame = IsotropicFrame::identity_map(p.dim);
  NoiseModel noise = NoiseModel::noiseless();

  // Mean of the sphere-sampling estimator.
  Vec mean = Vec::Zero(p.dim);
  QueryLedger ledger(static_cast<long>(p.reps) * p.n_per_rep + 1);
  for (int r = 0; r < p.reps; ++r) {
    SmoothedQuery sq{frame, z, p.c, p.n_per_rep, Phase::Gradient};
    GradientEstimate est = estimate_gradient(sq, spec, noise, ledger, rng);
    mean += est.gradient;
  }
  mean /= static_cast<double>(p.reps);

  // Central finite difference of the Monte-Carlo smoothed value with common
  // random numbers: the same smoothing draws are used at z +- h e_k, so the
  // difference estimate is nearly deterministic.
  Vec fd(p.dim);
  std::uint64_t crn_seed = mix64(seed ^ 0x5c5c5c5cULL);
  for (int k = 0; k < p.dim; ++k) {
    RngStream crn(crn_seed);
    double sum = 0.0;
    Vec zp = z, zm = z;
    zp[k] += p.fd_step;
    zm[k] -= p.fd_step;
    for (long i = 0; i < p.fd_samples; ++i) {
      Vec step = sample_ball(p.dim, p.c, crn);
      std::optional<double> fp = spec.evaluate(zp + step);
      std::optional<double> fm = spec.evaluate(zm + step);
      sum += ((fp ? *fp : 1.0) - (fm ? *fm : 1.0));
    }
    fd[k] = sum / (2.0 * p.fd_step * static_cast<double>(p.fd_samples));
  }

  // Oracle self-check: for this quadratic the smoothed gradient is 2 q z.
  Vec analytic = 2.0 * q * z;
  double oracle_err = (fd - analytic).norm() / std::max(1e-12, analytic.norm());

  bool pass = oracle_err <= 0.02;
  double worst_rel = 0.0;
  int checked = 0;
  for (int k = 0; k < p.dim; ++k) {
    if (std::abs(fd[k]) <= p.min_component) continue;
    ++checked;
    double rel = std::abs(mean[k] - fd[k]) / std::abs(fd[k]);
    worst_rel = std::max(worst_rel, rel);
    if (rel > p.rel_tol) pass = false;
  }

  std::ostringstream d;
  d << "d=" << p.dim << ", " << checked << " components checked, worst rel err "
    << fmt(worst_rel) << " (tol " << fmt(p.rel_tol) << "), fd-oracle self-err "
    << fmt(oracle_err);
  return {"stokes-gradient-identity", pass, d.str()};
}

PropertyResult check_correlation(const CorrelationParams& p, std::uint64_t seed) {
  RngStream rng = RngStream::derive(seed, {104});
  Box box = Box::cube(p.dim, -1.0, 1.0);
  IsotropicFrame frame = IsotropicFrame::identity_map(p.dim);
  NoiseModel noise = NoiseModel::noiseless();

  int passed = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  int generated = 0;
  for (int inst = 0; inst < p.instances; ++inst) {
    // Generate an instance that satisfies the smoothing-gap premise with an
    // analytic margin, then confirm the premise with Monte-Carlo values.
    double q = 0.0, c = 0.0;
    Vec x_star, z, z_tilde;
    ProblemSpec spec;
    double gc_z = 0.0, gc_se = 0.0, g_zt = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
      ++generated;
      x_star = Vec(p.dim);
      for (int k = 0; k < p.dim; ++k) x_star[k] = rng.uniform(-0.35, 0.35);
      double max_sq = 0.0;
      for (int k = 0; k < p.dim; ++k) {
        double m = std::max(x_star[k] + 1.0, 1.0 - x_star[k]);
        max_sq += m * m;
      }
      q = rng.uniform(0.3, 1.0) * 0.9 / max_sq;
      c = rng.uniform(0.05, 0.15);
      double radius = rng.uniform(0.5, 0.8);
      z = x_star + radius * random_unit_vector(p.dim, rng);
      if (z.lpNorm<Eigen::Infinity>() + 2.0 * c > 1.0) continue;
      z_tilde = x_star + sample_ball(p.dim, 0.05, rng);

      // Analytic smoothing gap of the unclipped quadratic.
      double gamma = static_cast<double>(p.dim) / (p.dim + 2);
      double gap = 3.0 * q * c * c * gamma;
      double drop = q * ((z - x_star).squaredNorm() - (z_tilde - x_star).squaredNorm()) +
                    q * c * c * gamma;
      if (!(gap <= 0.2 * drop)) continue;

      spec = make_quadratic(box, x_star, q);
      RngStream mc = RngStream::derive(seed, {105, static_cast<std::uint64_t>(inst)});
      McValue vc = mc_smoothed_value(spec, z, c, p.mc_samples, mc);
      McValue v2c = mc_smoothed_value(spec, z, 2.0 * c, p.mc_samples, mc);
      g_zt = *spec.evaluate(z_tilde);
      if (!(v2c.mean - vc.mean <= 0.25 * (vc.mean - g_zt))) continue;
      gc_z = vc.mean;
      gc_se = vc.se;
      ok = true;
    }
    if (!ok)
      return {"smoothed-gradient-correlation", false,
              "could not generate a premise-satisfying instance"};

    Vec dir = z - z_tilde;
    QueryLedger ledger(static_cast<long>(p.reps) * p.n_per_rep + 1);
    double proj_sum = 0.0, proj_sq = 0.0;
    for (int r = 0; r < p.reps; ++r) {
      SmoothedQuery sq{frame, z, c, p.n_per_rep, Phase::Gradient};
      GradientEstimate est = estimate_gradient(sq, spec, noise, ledger, rng);
      double proj = est.gradient.dot(dir);
      proj_sum += proj;
      proj_sq += proj * proj;
    }
    double proj_mean = proj_sum / p.reps;
    double proj_var = std::max(0.0, proj_sq / p.reps - proj_mean * proj_mean);
    double proj_se = std::sqrt(proj_var / p.reps);

    double rhs = 0.75 * (gc_z - g_zt) - 3.0 * (proj_se + 0.75 * gc_se);
    double margin = proj_mean - rhs;
    min_margin = std::min(min_margin, margin);
    if (margin >= 0.0) ++passed;
  }

  bool pass = passed == p.instances;
  std::ostringstream d;
  d << passed << "/" << p.instances << " instances (" << generated
    << " generated), min margin " << fmt(min_margin);
  return {"smoothed-gradient-correlation", pass, d.str()};
}

PropertyResult check_kls(const KlsParams& p, std::uint64_t seed) {
  bool pass = true;
  std::ostringstream d;
  for (std::size_t di = 0; di < p.dims.size(); ++di) {
    int dim = p.dims[di];
    RngStream rng = RngStream::derive(seed, {106, static_cast<std::uint64_t>(dim)});
    double worst = 0.0;
    for (int b = 0; b < p.bodies_per_dim; ++b) {
      ConvexBody body{random_box(dim, rng)};
      int cuts = static_cast<int>(rng.next_u64() % (p.max_cuts + 1));
      for (int cidx = 0; cidx < cuts; ++cidx) body = random_cut(std::move(body), rng);
      IsotropicFrame frame =
          estimate_frame(body, std::max<long>(frame_sample_count(dim), 2000), rng);
      std::vector<Vec> draws = sample_interior(body, p.samples, frame_burn_in(dim), rng);
      for (const Vec& x : draws)
        worst = std::max(worst, frame.whiten(x).norm());
    }
    double bound = 2.0 * std::sqrt(static_cast<double>(dim)) * (1.0 + p.slack);
    if (worst > bound) pass = false;
    d << "d=" << dim << " max|F(x)| " << fmt(worst) << " (bound " << fmt(bound)
      << ") ";
  }
  return {"kls-containment", pass, d.str()};
}

PropertyResult check_cut_volume(const CutVolumeParams& p, std::uint64_t seed) {
  int total = 0, inside = 0;
  double kept_min = 1.0, kept_max = 0.0;
  for (int dim : p.dims) {
    RngStream rng = RngStream::derive(seed, {107, static_cast<std::uint64_t>(dim)});
    const double z_cap =
        1.0 / (4.0 * std::exp(1.0) * std::sqrt(static_cast<double>(dim)));
    for (int b = 0; b < p.bodies_per_dim; ++b) {
      ConvexBody body{random_box(dim, rng)};
      for (int cidx = 0; cidx < p.cuts_per_body; ++cidx) {
        IsotropicFrame frame = estimate_frame(body, frame_sample_count(dim), rng);
        Vec z = sample_ball(dim, z_cap, rng);
        Vec u = random_unit_vector(dim, rng);
        ConvexBody next = apply_cut(body, frame, z, u, rng);
        double kept = estimate_volume_fraction(next, body, p.volume_samples, rng);
        ++total;
        kept_min = std::min(kept_min, kept);
        kept_max = std::max(kept_max, kept);
        if (kept >= 0.10 && kept <= 0.90) ++inside;
        body = std::move(next);
      }
    }
  }
  double share = total > 0 ? static_cast<double>(inside) / total : 0.0;
  bool pass = share >= p.min_share;
  std::ostringstream d;
  d << inside << "/" << total << " cuts kept both sides nontrivial (share "
    << fmt(share) << ", need >= " << fmt(p.min_share) << "), kept range ["
    << fmt(kept_min) << ", " << fmt(kept_max) << "]";
  return {"cut-volume-floor", pass, d.str()};
}

PropertyResult check_fcp_accounting(const FcpAccountingParams& p, std::uint64_t seed) {
  RngStream rng = RngStream::derive(seed, {108});
  Box box = Box::cube(2, -1.0, 1.0);
  ProblemSpec quad = make_quadratic(box, pattern_point(2, 1.0), 0.25);
  ProblemSpec steep = make_max_affine(box, pattern_point(2, 1.0), 0.6, 0.05);
  IsotropicFrame frame = IsotropicFrame::identity_map(2);

  struct Config {
    const ProblemSpec* spec;
    NoiseModel noise;
    long n;
    double c;
  };
  const Config configs[] = {
      {&quad, NoiseModel::bernoulli(), 1, 0.05},
      {&quad, NoiseModel::bernoulli(), 5, 0.1},
      {&quad, NoiseModel::noiseless(), 64, 0.2},
      {&quad, NoiseModel::bernoulli(), 1024, 0.1},
      {&steep, NoiseModel::noiseless(), 256, 0.3},
  };

  bool pass = true;
  double worst_ratio = 0.0;
  for (const Config& cfg : configs) {
    FcpParams fp = FcpParams::derive(cfg.c, cfg.n, 0.1);
    for (int r = 0; r < p.runs_per_config; ++r) {
      QueryLedger ledger(8 * fp.depth_cap * cfg.n + 16);
      Vec z0 = Vec::Zero(2);
      FcpResult res =
          run_fcp(z0, frame, fp, *cfg.spec, cfg.noise, ledger, rng);
      double budget_cap = 4.0 * static_cast<double>(fp.depth_cap) * cfg.n;
      worst_ratio = std::max(worst_ratio, res.queries_used / budget_cap);
      if (res.queries_used > budget_cap) pass = false;
      if ((res.z - z0).norm() > 2.0 * fp.depth_cap * fp.c + 1e-12) pass = false;
      if (res.depth > fp.depth_cap) pass = false;
      if (res.exhausted) pass = false;
    }
  }

  // Budget-exhaustion contract: with budget N/2 the search returns a partial
  // first estimate and stops at exactly N/2 queries.
  {
    FcpParams fp = FcpParams::derive(0.1, 64, 0.1);
    QueryLedger ledger(32);
    FcpResult res = run_fcp(Vec::Zero(2), frame, fp, quad,
                            NoiseModel::bernoulli(), ledger, rng);
    if (!res.exhausted || res.queries_used != 32 || res.depth != 0) pass = false;
  }

  std::ostringstream d;
  d << "worst queries/(4 M N) ratio " << fmt(worst_ratio)
    << ", exhaustion contract checked";
  return {"fcp-accounting", pass, d.str()};
}

std::vector<PropertyResult> run_validation_suite(const std::string& suite,
                                                 double eta_scale,
                                                 std::uint64_t seed) {
  std::vector<PropertyResult> out;
  bool all = suite == "all";
  bool known = all;

  if (all || suite == "concentration") {
    known = true;
    ValueConcentrationParams vp;
    vp.trials = 1500;
    vp.ref_samples = 2'000'000;
    vp.eta_scale = eta_scale;
    out.push_back(check_value_concentration(vp, seed));
    GradientConcentrationParams gp;
    gp.trials = 500;
    gp.eta_scale = eta_scale;
    out.push_back(check_gradient_concentration(gp, seed));
  }
  if (all || suite == "stokes") {
    known = true;
    StokesParams sp;
    sp.reps = 100;
    sp.fd_samples = 2'000'000;
    out.push_back(check_stokes(sp, seed));
  }
  if (all || suite == "correlation") {
    known = true;
    CorrelationParams cp;
    cp.instances = 30;
    cp.reps = 100;
    cp.n_per_rep = 1024;
    cp.mc_samples = 50'000;
    out.push_back(check_correlation(cp, seed));
  }
  if (all || suite == "kls") {
    known = true;
    KlsParams kp;
    kp.dims = {2, 5};
    kp.bodies_per_dim = 3;
    kp.samples = 30'000;
    out.push_back(check_kls(kp, seed));
  }
  if (all || suite == "cutvolume") {
    known = true;
    CutVolumeParams cv;
    cv.bodies_per_dim = 6;
    cv.cuts_per_body = 3;
    cv.volume_samples = 10'000;
    out.push_back(check_cut_volume(cv, seed));
  }
  if (all || suite == "fcp") {
    known = true;
    FcpAccountingParams fa;
    out.push_back(check_fcp_accounting(fa, seed));
  }
  if (!known) throw std::invalid_argument("unknown suite '" + suite + "'");
  return out;
}

}  // namespace gravicut
