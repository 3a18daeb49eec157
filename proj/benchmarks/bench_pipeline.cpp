#include <benchmark/benchmark.h>

#include "cda/expansion.hpp"
#include "cda/mc.hpp"

using namespace cda;

namespace {

void BM_beta_series(benchmark::State& state) {
  auto m = IncrementModel::make("gaussian");
  int order = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(beta_series(m, order));
}
BENCHMARK(BM_beta_series)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_rho_direct(benchmark::State& state) {
  auto m = IncrementModel::make("shifted_gamma:shape=4");
  QuadOptions o;
  o.tol = 1e-8;
  for (auto _ : state) benchmark::DoNotOptimize(rho_direct(m, 0.1, 0.2, o));
}
BENCHMARK(BM_rho_direct)->Unit(benchmark::kMillisecond);

void BM_overshoot_mc(benchmark::State& state) {
  auto m = IncrementModel::make("centered_exponential");
  std::uint64_t n = std::uint64_t(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(overshoot_transform(m, 0.1, 0.2, 50.0, n, seed++));
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n));
}
BENCHMARK(BM_overshoot_mc)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
