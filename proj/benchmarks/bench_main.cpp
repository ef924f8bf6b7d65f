#include <random>

#include <benchmark/benchmark.h>

#include "divclust/clustering.hpp"
#include "divclust/hsic.hpp"
#include "divclust/objective.hpp"
#include "divclust/synth.hpp"
#include "divclust/trainer.hpp"

using namespace divclust;

namespace {

Matrix noise(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

MultiViewDataset planted(Index n) {
  DualStructureParams p;
  p.instances = n;
  return standardize(make_dual_structure(p).dataset);
}

void BM_Hsic(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix a = noise(4, n, 1), b = noise(4, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hsic(a, b));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Hsic)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_HsicGradient(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix a = noise(4, n, 1), b = noise(4, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hsic_gradient(a, b));
}
BENCHMARK(BM_HsicGradient)->RangeMultiplier(4)->Range(64, 4096);

void BM_LossGradients(benchmark::State& state) {
  const auto data = planted(state.range(0));
  TrainConfig config;
  const auto s = init_state(data, config);
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradients(s.nets, s.subspaces, data, config));
}
BENCHMARK(BM_LossGradients)->Arg(200)->Arg(1000);

void BM_TrainEpoch(benchmark::State& state) {
  const auto data = planted(state.range(0));
  TrainConfig config;
  const auto start = init_state(data, config);
  for (auto _ : state) benchmark::DoNotOptimize(train_epoch(start, data, config));
}
BENCHMARK(BM_TrainEpoch)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const Matrix p = noise(4, state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(p, 3, 0));
}
BENCHMARK(BM_KMeans)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
