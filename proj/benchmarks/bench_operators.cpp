#include <benchmark/benchmark.h>

#include "speclab/heatdet.hpp"
#include "speclab/magnetic.hpp"
#include "speclab/nonlaplace.hpp"

namespace {

using namespace speclab;

void BM_HeatDetCircle(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(heat_det(Circle{}, 1e-3).value);
}
BENCHMARK(BM_HeatDetCircle);

void BM_HeatDetTorus(benchmark::State& state) {
  const FlatTorus torus{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 0.0};
  const double t = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(heat_det(torus, t).value);
}
BENCHMARK(BM_HeatDetTorus)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_HeatDetDefining(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(heat_det_defining(Circle{}, 0.1).value);
}
BENCHMARK(BM_HeatDetDefining);

void BM_LandauCheck(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(landau_check(1.5, 0.7).difference);
}
BENCHMARK(BM_LandauCheck);

void BM_A2Density(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(N, 1.0, 2.0);
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(N, N);
  Q(0, N - 1) = Q(N - 1, 0) = 0.3;
  const auto sym = ConstantSymbol::diagonal(2, h, Q);
  for (auto _ : state) benchmark::DoNotOptimize(a2_density(sym).value);
}
BENCHMARK(BM_A2Density)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
