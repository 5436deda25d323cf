#include <benchmark/benchmark.h>

#include "gravicut/cut.hpp"
#include "gravicut/harness.hpp"
#include "gravicut/smoothing.hpp"

using namespace gravicut;

namespace {

ConvexBody cut_box(int dim, int cuts, RngStream& rng) {
  ConvexBody body{Box::cube(dim, -1.0, 1.0)};
  for (int i = 0; i < cuts; ++i) {
    Vec p = sample_interior(body, 1, 20, rng)[0];
    Vec w2 = sample_interior(body, 1, 20, rng)[0];
    Vec n = random_unit_vector(dim, rng);
    if (n.dot(w2 - p) > 0.0) n = -n;
    std::vector<Halfspace> cs = body.cuts();
    cs.emplace_back(n, n.dot(p));
    body = ConvexBody(body.base(), std::move(cs), w2);
  }
  return body;
}

void bm_hit_and_run(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int cuts = static_cast<int>(state.range(1));
  RngStream rng(1);
  ConvexBody body = cut_box(dim, cuts, rng);
  for (auto _ : state) {
    auto draws = sample_interior(body, 256, 0, rng);
    benchmark::DoNotOptimize(draws.back());
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(bm_hit_and_run)->Args({2, 0})->Args({2, 16})->Args({5, 16})->Args({10, 32});

void bm_estimate_frame(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  RngStream rng(2);
  ConvexBody body = cut_box(dim, 8, rng);
  for (auto _ : state) {
    IsotropicFrame f = estimate_frame(body, frame_sample_count(dim), rng);
    benchmark::DoNotOptimize(f.sqrt_cov);
  }
}
BENCHMARK(bm_estimate_frame)->Arg(2)->Arg(5);

void bm_ball_sampling(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  RngStream rng(3);
  for (auto _ : state) {
    Vec z = sample_ball(dim, 0.5, rng);
    benchmark::DoNotOptimize(z);
  }
}
BENCHMARK(bm_ball_sampling)->Arg(2)->Arg(10);

void bm_value_estimate(benchmark::State& state) {
  ExperimentConfig cfg;
  ProblemSpec spec = make_default_problem(cfg, 3);
  IsotropicFrame frame = IsotropicFrame::identity_map(3);
  NoiseModel noise = NoiseModel::bernoulli();
  RngStream rng(4);
  Vec z = Vec::Zero(3);
  for (auto _ : state) {
    QueryLedger ledger(4096);
    SmoothedQuery q{frame, z, 0.1, 4096, Phase::Fcp};
    ValueEstimate est = estimate_value(q, spec, noise, ledger, rng);
    benchmark::DoNotOptimize(est.value);
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(bm_value_estimate);

void bm_gradient_estimate(benchmark::State& state) {
  ExperimentConfig cfg;
  ProblemSpec spec = make_default_problem(cfg, 3);
  IsotropicFrame frame = IsotropicFrame::identity_map(3);
  NoiseModel noise = NoiseModel::bernoulli();
  RngStream rng(5);
  Vec z = Vec::Zero(3);
  for (auto _ : state) {
    QueryLedger ledger(4096);
    SmoothedQuery q{frame, z, 0.1, 4096, Phase::Gradient};
    GradientEstimate est = estimate_gradient(q, spec, noise, ledger, rng);
    benchmark::DoNotOptimize(est.gradient);
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(bm_gradient_estimate);

void bm_cut_iteration(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  ExperimentConfig cfg;
  ProblemSpec spec = make_default_problem(cfg, dim);
  long budget = dim == 2 ? 1'000'000 : 2'000'000;
  auto params = derive_params(budget, dim, spec.diameter, spec.inner_radius, 0.1);
  NoiseModel noise = NoiseModel::noiseless();
  RngStream rng(6);
  for (auto _ : state) {
    state.PauseTiming();
    Vec center = spec.domain.center();
    OptState st(ConvexBody(spec.domain), center, *spec.evaluate(center),
                QueryLedger(budget));
    state.ResumeTiming();
    run_cut_iteration(st, *params, spec, noise, rng);
    benchmark::DoNotOptimize(st.incumbent_f);
  }
}
BENCHMARK(bm_cut_iteration)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
