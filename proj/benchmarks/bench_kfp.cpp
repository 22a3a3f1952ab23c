#include <benchmark/benchmark.h>

#include <cmath>

#include "kfp/kernels.hpp"
#include "kfp/phase_space.hpp"
#include "kfp/propagator.hpp"

using namespace kfp;

namespace {

Field gaussian(const PhaseGrid& g) {
  return Field::sample(g, [](auto z) { return std::exp(-z[0] * z[0] / 2 - z[1] * z[1] / 2); });
}

void BM_TimeProfiles(benchmark::State& state) {
  double t = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::time_profiles(t));
    t = t < 50 ? t * 1.01 : 1e-3;
  }
}
BENCHMARK(BM_TimeProfiles);

void BM_FreeKernel1D(benchmark::State& state) {
  const double x = 0.3, xp = -0.1, v = 0.7, vp = 0.2;
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::free_kernel({std::span(&x, 1), std::span(&xp, 1), std::span(&v, 1), std::span(&vp, 1), 1.0}));
}
BENCHMARK(BM_FreeKernel1D);

void BM_FreeStepFourier(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const PhaseGrid g(1, Axis{8.0, N}, Axis{8.0, N});
  const Field f = gaussian(g);
  const FreePropagator p(g, 0.1, Backend::fourier_factorized);
  for (auto _ : state) benchmark::DoNotOptimize(p.apply(f));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.cell_count()));
}
BENCHMARK(BM_FreeStepFourier)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_FreeStepDirect(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const PhaseGrid g(1, Axis{8.0, N}, Axis{8.0, N});
  const Field f = gaussian(g);
  const FreePropagator p(g, 0.1, Backend::direct_kernel);
  for (auto _ : state) benchmark::DoNotOptimize(p.apply(f));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.cell_count()));
}
BENCHMARK(BM_FreeStepDirect)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DriftStep(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const PhaseGrid g(1, Axis{8.0, N}, Axis{8.0, N});
  const Field f = gaussian(g);
  const Potential V = Potential::inverse_power(0.5, 2.0);
  PropagatorPlan plan;
  plan.interpolation = state.range(1) == 0 ? Interpolation::linear : Interpolation::cubic;
  for (auto _ : state) benchmark::DoNotOptimize(drift_step(f, 0.01, V, plan));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.cell_count()));
}
BENCHMARK(BM_DriftStep)->Args({128, 0})->Args({128, 1})->Args({256, 1})->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
