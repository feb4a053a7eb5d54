// Grid + OpenMP paths against the brute-force serial reference.

#include <benchmark/benchmark.h>

#include <cmath>

#include "resdens/density.hpp"
#include "resdens/dgp.hpp"
#include "resdens/reference.hpp"
#include "resdens/smoother.hpp"

using namespace resdens;

namespace {

struct Setup {
  DGPSpec dgp = DGPSpec::default_acceptance();
  Dataset data;
  ProductKernel k0{UnivariateKernel::quadweight(), 1};
  double b0;

  // Default bandwidth follows the admissible schedule 0.5 n^-0.2; a fixed
  // narrow one shows the grid's near-linear regime.
  explicit Setup(std::size_t n, double fixed_b0 = 0.0)
      : data(generate_sample(dgp, n, 7)),
        b0(fixed_b0 > 0.0 ? fixed_b0 : 0.5 * std::pow(static_cast<double>(n), -0.2)) {}
};

void BM_FitGrid(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  const auto trim = s.dgp.trim_region();
  for (auto _ : state) benchmark::DoNotOptimize(fit_residuals(s.data, s.k0, s.b0, trim));
  state.SetComplexityN(state.range(0));
}

void BM_FitReference(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  const auto trim = s.dgp.trim_region();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::fit_residuals(s.data, s.k0, s.b0, trim));
  }
  state.SetComplexityN(state.range(0));
}

void BM_FitGridNarrow(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)), 0.005);
  const auto trim = s.dgp.trim_region();
  for (auto _ : state) benchmark::DoNotOptimize(fit_residuals(s.data, s.k0, s.b0, trim));
  state.SetComplexityN(state.range(0));
}

void BM_FitReferenceNarrow(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)), 0.005);
  const auto trim = s.dgp.trim_region();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::fit_residuals(s.data, s.k0, s.b0, trim));
  }
  state.SetComplexityN(state.range(0));
}

void BM_DensityParallel(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  const auto fit = fit_residuals(s.data, s.k0, s.b0, s.dgp.trim_region());
  const auto k1 = UnivariateKernel::quadweight();
  for (auto _ : state) benchmark::DoNotOptimize(fhat(fit, k1, 0.2));
}

void BM_DensityReference(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  const auto fit = fit_residuals(s.data, s.k0, s.b0, s.dgp.trim_region());
  const auto k1 = UnivariateKernel::quadweight();
  const auto grid = fhat(fit, k1, 0.2).grid;
  for (auto _ : state) benchmark::DoNotOptimize(reference::fhat(fit, k1, 0.2, grid));
}

}  // namespace

BENCHMARK(BM_FitGrid)->RangeMultiplier(4)->Range(500, 32000)->Complexity();
BENCHMARK(BM_FitReference)->RangeMultiplier(4)->Range(500, 8000)->Complexity();
BENCHMARK(BM_FitGridNarrow)->RangeMultiplier(4)->Range(2000, 32000)->Complexity();
BENCHMARK(BM_FitReferenceNarrow)->RangeMultiplier(4)->Range(2000, 32000)->Complexity();
BENCHMARK(BM_DensityParallel)->Arg(2000)->Arg(20000);
BENCHMARK(BM_DensityReference)->Arg(2000)->Arg(20000);

BENCHMARK_MAIN();
