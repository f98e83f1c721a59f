#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hsvm/loss.hpp"
#include "hsvm/prox.hpp"
#include "hsvm/solver.hpp"
#include "hsvm/synth.hpp"

using namespace hsvm;

namespace {

std::vector<double> normal_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

void BM_EqConstrainedProx(benchmark::State& state) {
  const auto z = normal_vector(static_cast<std::size_t>(state.range(0)), 1);
  EqConstrainedProx prox;
  std::vector<double> w(z.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox.solve(z, 0.3, w));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_EqConstrainedProx)->Arg(4)->Arg(12)->Arg(100);

void BM_BinaryGradient(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Dataset data = generate({1000, p, 10, 0.0, 2, SynthKind::binary_gaussian});
  const auto margins = normal_vector(data.rows(), 3);
  std::vector<double> grad(p + 1);
  for (auto _ : state) {
    binary_smooth_grad_into(margins, data, 1.0, grad);
    benchmark::DoNotOptimize(grad.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(data.nnz()));
}
BENCHMARK(BM_BinaryGradient)->Arg(100)->Arg(1000);

void BM_MultiGradient(benchmark::State& state) {
  const Dataset data = generate({400, 500, 30, 0.0, 4, SynthKind::four_class});
  const auto margins = normal_vector(data.rows() * 4, 5);
  std::vector<double> grad(4 + 500 * 4);
  for (auto _ : state) {
    multi_smooth_grad_into(margins, data, 1.0, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_MultiGradient);

void BM_FitBinary(benchmark::State& state) {
  const Dataset data = generate({500, 50, 5, 0.0, 6, SynthKind::binary_gaussian});
  const Hyperparams hp{0.01, 0.01, 0.01, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(fit_binary(data, hp).final_objective);
}
BENCHMARK(BM_FitBinary)->Unit(benchmark::kMillisecond);

void BM_FitBinaryTwoStage(benchmark::State& state) {
  const Dataset data = generate({200, 2000, 100, 0.0, 7, SynthKind::binary_gaussian});
  const Hyperparams hp{0.1, 0.1, 0.1, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        (state.range(0) ? fit_binary_two_stage(data, hp) : fit_binary(data, hp)).final_objective);
  }
}
BENCHMARK(BM_FitBinaryTwoStage)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FitMulti(benchmark::State& state) {
  const Dataset data = generate({100, 500, 30, 0.0, 8, SynthKind::four_class});
  const Hyperparams hp{0.1, 1.0, 1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(fit_multi(data, hp).final_objective);
}
BENCHMARK(BM_FitMulti)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
