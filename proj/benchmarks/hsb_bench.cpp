#include <benchmark/benchmark.h>

#include "hsb/conformal.hpp"
#include "hsb/evolution.hpp"
#include "hsb/geometry.hpp"
#include "hsb/potential.hpp"

using namespace hsb;

namespace {

geometry::BubbleSystem two_disks(std::size_t n) {
  return geometry::make_system({geometry::make_circle({0.0, 0.0}, 1.0, n, true),
                                geometry::make_circle({2.5, 0.0}, 0.5, n / 2, true)});
}

}  // namespace

// Segment-exact potential, value + gradient + Hessian at an exterior point.
static void BM_eval_potential(benchmark::State& state) {
  const auto sys = two_disks(static_cast<std::size_t>(state.range(0)));
  const geometry::Point p(1.6, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(potential::eval_potential(sys, p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_eval_potential)->RangeMultiplier(2)->Range(128, 2048)->Complexity(benchmark::oN);

// Dense boundary-integral solve for free extraction.
static void BM_solve_field(benchmark::State& state) {
  const auto sys = two_disks(static_cast<std::size_t>(state.range(0)));
  const auto flux = evolution::FluxSpec::free_flux(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(evolution::solve_field(sys, flux));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_solve_field)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oNCubed)->Unit(benchmark::kMillisecond);

// One explicit midpoint step including remeshing.
static void BM_step(benchmark::State& state) {
  const auto sys = two_disks(256);
  const auto flux = evolution::FluxSpec::free_flux(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(evolution::step(sys, flux, 1e-3, 0.02));
}
BENCHMARK(BM_step)->Unit(benchmark::kMillisecond);

// Cubic solve and trace of the two-disk exterior map.
static void BM_kufarev_trace(benchmark::State& state) {
  for (auto _ : state) {
    const auto map = conformal::kufarev_solve(3.0, 1.0, 0.5, 1.0, 0.5);
    benchmark::DoNotOptimize(conformal::trace_boundary(map, 1024));
  }
}
BENCHMARK(BM_kufarev_trace);
BENCHMARK_MAIN();
