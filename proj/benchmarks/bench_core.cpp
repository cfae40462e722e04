#include <benchmark/benchmark.h>

#include <numbers>

#include "finsler/comparison.hpp"
#include "finsler/curvature.hpp"
#include "finsler/fixtures.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/measure.hpp"
#include "finsler/norm_core.hpp"

using namespace finsler;

static void BM_FundamentalTensor(benchmark::State& state) {
  const FinslerStructure s = funk_disk();
  const TangentVector v{Vec{0.2, -0.1}, Vec{0.5, 0.7}};
  for (auto _ : state) benchmark::DoNotOptimize(fundamental_tensor(s, v));
}
BENCHMARK(BM_FundamentalTensor);

static void BM_FlagCurvature(benchmark::State& state) {
  const FinslerStructure s = randers(Vec{0.2, 0.0}, 0.3);
  const Flag f{Vec{0.1, 0.2}, Vec{1.0, 0.4}, Vec{-0.3, 1.0}};
  for (auto _ : state) benchmark::DoNotOptimize(flag_curvature(s, f));
}
BENCHMARK(BM_FlagCurvature);

static void BM_SphereGeodesic(benchmark::State& state) {
  const FinslerStructure s = riemann_sphere();
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_geodesic(s, Vec{0.5, 0.0}, Vec{0.0, 0.625}, std::numbers::pi));
}
BENCHMARK(BM_SphereGeodesic)->Unit(benchmark::kMillisecond);

static void BM_SphereDistance(benchmark::State& state) {
  const FinslerStructure s = riemann_sphere();
  for (auto _ : state) benchmark::DoNotOptimize(distance(s, Vec{0.2, -0.3}, Vec{-0.4, 0.5}));
}
BENCHMARK(BM_SphereDistance)->Unit(benchmark::kMillisecond);

static void BM_CylinderDistance(benchmark::State& state) {
  const FinslerStructure s = flat_cylinder(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(distance(s, Vec{0.2, -0.3}, Vec{40.0, 0.45}));
}
BENCHMARK(BM_CylinderDistance);

static void BM_ExactBallVolume(benchmark::State& state) {
  const FinslerStructure s = flat_cylinder(1.0);
  const double r = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ball_volume(s, Vec{0, 0}, r));
}
BENCHMARK(BM_ExactBallVolume)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_NumericComparisonTriangle(benchmark::State& state) {
  const ModelSurface m = make_polynomial_model({0.0, 1.0, 0.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(comparison_triangle(m, 0.6, 0.8, 0.9));
}
BENCHMARK(BM_NumericComparisonTriangle)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
