#include <benchmark/benchmark.h>

#include "cgei/forward.hpp"
#include "cgei/phantom.hpp"
#include "cgei/reconstruct.hpp"
#include "cgei/speckle.hpp"
#include "cgei/tv_solver.hpp"

using namespace cgei;

static void BM_GeneratePatterns(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_patterns(n, n, 500, 1));
}
BENCHMARK(BM_GeneratePatterns)->Arg(32)->Arg(64);

static void BM_Acquire(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PatternStack s = generate_patterns(n, n, 1000, 1);
  const Image obj = shapes_phantom(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(acquire(s, obj));
}
BENCHMARK(BM_Acquire)->Arg(32)->Arg(64);

static void BM_Correlate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PatternStack s = generate_patterns(n, n, 1000, 1);
  const BucketVector y = acquire(s, shapes_phantom(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(correlate(s, y));
}
BENCHMARK(BM_Correlate)->Arg(32)->Arg(64);

static void BM_SolveTv(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PatternStack s = generate_patterns(n, n, n * n * 3 / 10, 1);
  const MeasurementMatrix a = assemble_matrix(s);
  const BucketVector y = acquire(s, shapes_phantom(n, n));
  const auto values = y.values();
  for (auto _ : state) benchmark::DoNotOptimize(solve_tv(a, values));
}
BENCHMARK(BM_SolveTv)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
