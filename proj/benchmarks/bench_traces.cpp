#include <benchmark/benchmark.h>

#include "speclab/mellin.hpp"
#include "speclab/traces.hpp"

namespace {

using namespace speclab;

void BM_CircleTrace(benchmark::State& state) {
  const HeatTrace trace(Circle{}, heat_cutoff(Circle{}, 0.05));
  const auto method = state.range(0) ? TraceMethod::Theta : TraceMethod::Direct;
  for (auto _ : state) benchmark::DoNotOptimize(trace(0.05, method).value);
}
BENCHMARK(BM_CircleTrace)->Arg(0)->Arg(1);

void BM_TorusTrace(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const FlatTorus torus{Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim), 1.0};
  const HeatTrace trace(torus, heat_cutoff(torus, 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(trace(0.1, TraceMethod::Direct).value);
}
BENCHMARK(BM_TorusTrace)->DenseRange(1, 3);

void BM_HeatTraceSetup(benchmark::State& state) {
  for (auto _ : state) {
    const HeatTrace trace(Sphere2{}, heat_cutoff(Sphere2{}, 1e-3));
    benchmark::DoNotOptimize(trace.spectrum().entries.size());
  }
}
BENCHMARK(BM_HeatTraceSetup);

void BM_QuantumTrace(benchmark::State& state) {
  const Circle massive{1.0, 0.0, 1.0};
  const HeatTrace trace(massive, sqrt_cutoff(massive, 0.5));
  const auto path = state.range(0) ? SumPath::Integral : SumPath::Direct;
  for (auto _ : state) benchmark::DoNotOptimize(quantum_trace(trace, 0.5, 0.2, Statistics::Fermi, path).value);
}
BENCHMARK(BM_QuantumTrace)->Arg(0)->Arg(1);

void BM_Zeta(benchmark::State& state) {
  const auto method = state.range(0) ? ZetaMethod::Continuation : ZetaMethod::Direct;
  const SpectralQuery query{0.0, true};
  for (auto _ : state) benchmark::DoNotOptimize(zeta(Circle{}, {1.5, 0.0}, query, method).value);
}
BENCHMARK(BM_Zeta)->Arg(0)->Arg(1);

void BM_LogDet(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(log_det(Circle{1.0, 0.0, 1.0}).log_det);
}
BENCHMARK(BM_LogDet);

}  // namespace
