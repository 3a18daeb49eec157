#include <benchmark/benchmark.h>

#include <random>

#include "cda/pseries.hpp"

using cda::DSeries;

namespace {

DSeries random_series(int order, unsigned seed, bool unit = false) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  DSeries s(order, "x");
  for (int k = 0; k <= order; ++k) s.set(k, coef(gen));
  if (unit) s.set(0, 1.0);
  return s;
}

void BM_series_mul(benchmark::State& state) {
  int n = int(state.range(0));
  DSeries a = random_series(n, 1), b = random_series(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_series_mul)->Arg(8)->Arg(16)->Arg(48);

void BM_series_log(benchmark::State& state) {
  DSeries a = random_series(int(state.range(0)), 3, true);
  for (auto _ : state) benchmark::DoNotOptimize(a.log());
}
BENCHMARK(BM_series_log)->Arg(8)->Arg(48);

void BM_series_revert(benchmark::State& state) {
  int n = int(state.range(0));
  DSeries a = random_series(n, 4);
  a.set(0, 0.0);
  a.set(1, 1.25);
  for (auto _ : state) benchmark::DoNotOptimize(a.revert());
}
BENCHMARK(BM_series_revert)->Arg(8)->Arg(16);

}  // namespace
