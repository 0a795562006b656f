#include <benchmark/benchmark.h>

#include <metrogap/families.hpp>
#include <metrogap/mixing.hpp>
#include <metrogap/pathbound.hpp>
#include <metrogap/recipe.hpp>
#include <metrogap/spectral.hpp>

using namespace metrogap;

namespace {

ExpLinear explinear(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  return ExpLinear{double(N), double(N), N};
}

void BM_BuildChain(benchmark::State& state) {
  const auto f = explinear(state);
  for (auto _ : state) benchmark::DoNotOptimize(build_chain(f));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_BuildChain)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_GapDense(benchmark::State& state) {
  const auto c = build_chain(explinear(state));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(c, {.mode = SolverMode::Dense}).lambda);
}
BENCHMARK(BM_GapDense)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_GapIterative(benchmark::State& state) {
  const auto c = build_chain(explinear(state));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(c, {.mode = SolverMode::Iterative}).lambda);
}
BENCHMARK(BM_GapIterative)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_OneDGap(benchmark::State& state) {
  const auto c = build_chain(OneDAsym1{2.0, 3.0, static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(c).lambda);
}
BENCHMARK(BM_OneDGap)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_WSegment(benchmark::State& state) {
  const OneDAsym2 f{1.0, 2.0, static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  const auto c = build_chain(f);
  const auto r = recipe(f);
  for (auto _ : state) benchmark::DoNotOptimize(compute_W(c, r.paths, r.weight, {.threads = 1}).W);
}
BENCHMARK(BM_WSegment)->Arg(256)->Arg(4096)->Unit(benchmark::kMicrosecond);

void BM_WValley(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Valley v{.alpha = 1.0, .A = double(N), .N = N};
  const auto c = build_chain(v);
  const auto r = recipe(v);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_W(c, r.paths, r.weight, {.symmetry_reduction = true, .threads = 1}).W);
  }
}
BENCHMARK(BM_WValley)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_WToPoint(benchmark::State& state) {
  const auto f = explinear(state);
  const auto c = build_chain(f);
  const auto r = recipe(f);
  for (auto _ : state) benchmark::DoNotOptimize(compute_W(c, r.paths, r.weight, {.threads = 1}).W);
}
BENCHMARK(BM_WToPoint)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MixingTimes(benchmark::State& state) {
  const auto c = build_chain(explinear(state));
  const double lambda = spectral_gap(c).lambda;
  for (auto _ : state) benchmark::DoNotOptimize(mixing_times(c, {.lambda = lambda}).T_TV);
}
BENCHMARK(BM_MixingTimes)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
