#include <benchmark/benchmark.h>

#include "pbf/carrier.hpp"
#include "pbf/green_ansatz.hpp"
#include "pbf/model.hpp"

namespace {

void BM_BuildParaOps(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const int M = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(pbf::build_para_ops(p, M));
  state.counters["ambient"] = static_cast<double>(pbf::ModeLayout::ambient_dim_for(p, M));
}
BENCHMARK(BM_BuildParaOps)->Args({2, 6})->Args({3, 6})->Args({4, 6})->Unit(benchmark::kMillisecond);

void BM_CheckTrilinear(benchmark::State& state) {
  const auto ops = pbf::build_para_ops(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(pbf::check_trilinear(ops, 1e-10));
}
BENCHMARK(BM_CheckTrilinear)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ExtractCarrier(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto ops = pbf::build_para_ops(p, 6);
  for (auto _ : state) benchmark::DoNotOptimize(pbf::extract_carrier(ops, 5));
}
BENCHMARK(BM_ExtractCarrier)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_Spectrum(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto ops = pbf::build_para_ops(p, 6);
  const auto basis = pbf::extract_carrier(ops, 5);
  const auto projected = pbf::project_ops(ops, basis);
  pbf::ModelParams params;
  params.lambda = 0.7;
  for (auto _ : state) {
    const auto h = pbf::build_hamiltonian(params, projected);
    benchmark::DoNotOptimize(pbf::spectrum(h));
  }
}
BENCHMARK(BM_Spectrum)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
