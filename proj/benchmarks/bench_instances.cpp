#include <benchmark/benchmark.h>

#include "speclab/invariants.hpp"
#include "speclab/weyl.hpp"
#include "speclab_cli/instances.hpp"

namespace {

using namespace speclab;

void BM_GgsGammaQuadrature(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sym = cli::random_clifford_symbol(n, 2, 0.5, 7);
  for (auto _ : state) benchmark::DoNotOptimize(ggs_gamma(sym, GammaMethod::Quadrature, 1e-8).value);
}
BENCHMARK(BM_GgsGammaQuadrature)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_WeylKernel(benchmark::State& state) {
  const auto pair = cli::random_weyl_pair(2, 11);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(2, 0.3), xp = Eigen::VectorXd::Constant(2, -0.2);
  for (auto _ : state) benchmark::DoNotOptimize(convolution_kernel(pair, 0.4, 0.6, x, xp));
}
BENCHMARK(BM_WeylKernel);

void BM_WeylNumericConvolution(benchmark::State& state) {
  const auto pair = cli::random_weyl_pair(2, 11);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(2, 0.3), xp = Eigen::VectorXd::Constant(2, -0.2);
  for (auto _ : state) benchmark::DoNotOptimize(numeric_convolution(pair, 0.4, 0.6, x, xp).value);
}
BENCHMARK(BM_WeylNumericConvolution)->Unit(benchmark::kMillisecond);

}  // namespace
