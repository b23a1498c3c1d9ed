#include <benchmark/benchmark.h>

#include "pathatlas/atlas.hpp"
#include "pathatlas/fixtures.hpp"
#include "pathatlas/ift.hpp"
#include "pathatlas/lift.hpp"
#include "pathatlas/tame.hpp"

using namespace pathatlas;

namespace {

void BM_PathNorms(benchmark::State& state) {
  auto scale = ScalePair::loop(6);
  const TimeGrid grid = grid_make(10.0, static_cast<int>(state.range(0)));
  Rng rng(1);
  const GridPath p = fixtures::random_bump_path(grid, scale, rng, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(path_norms(p));
}
BENCHMARK(BM_PathNorms)->Arg(500)->Arg(2000);

void BM_Mollify(benchmark::State& state) {
  auto scale = ScalePair::constant(1);
  const TimeGrid grid = grid_make(10.0, static_cast<int>(state.range(0)));
  Rng rng(2);
  const GridPath p = fixtures::random_bump_path(grid, scale, rng, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(mollify(p, 0.4));
}
BENCHMARK(BM_Mollify)->Arg(500)->Arg(2000);

void BM_LoopMapEval(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), K, 4 * K + 16);
  Rng rng(3);
  const ScaleVector x(phi.scale, rng.gaussian_vector(phi.scale->modes()));
  for (auto _ : state) benchmark::DoNotOptimize(phi.eval(x));
}
BENCHMARK(BM_LoopMapEval)->Arg(4)->Arg(6)->Arg(12);

void BM_TamenessSample(benchmark::State& state) {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 6, 64);
  const ScaleVector x = ScaleVector::basis(phi.scale, 1, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(verify_tameness(phi, x, 0.5, 10.0,
                                             static_cast<int>(state.range(0)), 7));
}
BENCHMARK(BM_TamenessSample)->Arg(100)->Arg(1000);

void BM_ContractionInvert(benchmark::State& state) {
  const TameMap phi = fixtures::scalar_tame(scalar_sine_map(0.4));
  const NearIdentityMap m =
      assume_near_identity(phi, ScaleVector::zero(phi.scale), 1.0, 0.4);
  const ScaleVector y(phi.scale, {0.55});
  for (auto _ : state)
    benchmark::DoNotOptimize(newton_invert(m, y, 1e-12, 60));
}
BENCHMARK(BM_ContractionInvert);

void BM_TransitionEval(benchmark::State& state) {
  const TimeGrid grid = grid_make(3.0, static_cast<int>(state.range(0)));
  CalibrationOptions opt;
  opt.eps0 = 0.8;
  const PathChart A =
      fixtures::calibrated_chart(fixtures::make_warped_atlas(2, 0, grid), opt);
  const PathChart B =
      fixtures::calibrated_chart(fixtures::make_warped_atlas(2, 1, grid), opt);
  Rng rng(4);
  const GridPath xi = fixtures::random_bump_path(
      grid, A.x.path.scale(), rng, 0.15 * std::min(A.R, B.R));
  for (auto _ : state)
    benchmark::DoNotOptimize(transition_eval(A, B, xi, 1e-12));
}
BENCHMARK(BM_TransitionEval)->Arg(120)->Arg(240);

}  // namespace

BENCHMARK_MAIN();
