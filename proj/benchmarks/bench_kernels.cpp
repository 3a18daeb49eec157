#include <benchmark/benchmark.h>

#include "cda/kernels.hpp"
#include "cda/quadrature.hpp"

using namespace cda;

namespace {

void BM_htilde_eval(benchmark::State& state) {
  auto m = IncrementModel::make("centered_exponential");
  Kernel h = h_kernel(m, 3, HVariant::h_tilde);
  double l = 0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(h(l));
    l = l < 40.0 ? l * 1.01 : 0.9;
  }
}
BENCHMARK(BM_htilde_eval);

void BM_reduced_kernel_eval(benchmark::State& state) {
  auto m = IncrementModel::make("gaussian");
  ReducedKernels red = assemble_reduced_kernels(m, 5, KernelConfig{0.25, 48});
  const Kernel& k = red.at(1, 4);
  double l = 0.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k(l));
    l = l < 40.0 ? l * 1.01 : 0.7;
  }
}
BENCHMARK(BM_reduced_kernel_eval);

void BM_line_integral(benchmark::State& state) {
  auto m = IncrementModel::make("laplace");
  Kernel h = h_kernel(m, 1, HVariant::h_tilde, KernelConfig{0.25, 48});
  EvenKernel t = t_even(1, re_part(h));
  QuadOptions o;
  o.tol = 1e-10;
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_line_even([&t](double l) { return t(l); }, o));
}
BENCHMARK(BM_line_integral);

}  // namespace
