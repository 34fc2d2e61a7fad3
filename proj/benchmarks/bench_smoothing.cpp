#include <benchmark/benchmark.h>

#include "npmix/init.hpp"
#include "npmix/mm.hpp"
#include "npmix/simulate.hpp"
#include "npmix/smoothing.hpp"

namespace {

using namespace npmix;

struct Fixture {
  Dataset ds;
  GridPtr grid;
  BandwidthMatrix H;
  MixtureState init;

  explicit Fixture(int n, int pts)
      : ds(sample_mixture(table1_components(), n, 7)),
        grid(build_grid(ds.data, 0.15, {pts, pts})),
        H(normal_reference_bandwidth(ds.data)),
        init(init_state_from_labels(ds.data, kmeans(ds.data, 3, 1), grid, H)) {}
};

void BM_SmoothingOperatorBuild(benchmark::State& state) {
  Fixture fx(300, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    SmoothingOperator op(fx.grid, fx.H);
    benchmark::DoNotOptimize(op);
  }
}
BENCHMARK(BM_SmoothingOperatorBuild)->Arg(40)->Arg(60);

void BM_NonlinearSmooth(benchmark::State& state) {
  Fixture fx(300, static_cast<int>(state.range(0)));
  SmoothingOperator op(fx.grid, fx.H);
  for (auto _ : state) {
    auto nf = op.nonlinear(fx.init.f[0].values());
    benchmark::DoNotOptimize(nf);
  }
}
BENCHMARK(BM_NonlinearSmooth)->Arg(40)->Arg(60);

void BM_FitIterations(benchmark::State& state) {
  Fixture fx(static_cast<int>(state.range(0)), 60);
  FitConfig cfg;
  cfg.max_iter = 5;
  cfg.rel_tol = 1e-14;
  for (auto _ : state) {
    auto res = fit(fx.ds.data, fx.init, fx.H, cfg);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_FitIterations)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
