#include <benchmark/benchmark.h>

#include <random>

#include "adascale/model.hpp"

using namespace adascale;

namespace {

Matrix features(Eigen::Index rows, Eigen::Index d) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(rows, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return x;
}

Architecture arch_for(int64_t hidden) {
  if (hidden == 0) return LinearArch{};
  return MlpArch{static_cast<std::size_t>(hidden), Activation::Tanh};
}

// Args: batch size, hidden width (0 = linear).
void BM_Forward(benchmark::State& state) {
  const auto params = ModelParams::init(arch_for(state.range(1)), 20, 5, 1);
  const Matrix x = features(state.range(0), 20);
  for (auto _ : state) benchmark::DoNotOptimize(forward(params, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ForwardBackward(benchmark::State& state) {
  const auto params = ModelParams::init(arch_for(state.range(1)), 20, 5, 1);
  const Matrix x = features(state.range(0), 20);
  std::vector<Label> gold(static_cast<std::size_t>(state.range(0)), 0);
  for (std::size_t i = 0; i < gold.size(); i += 10) gold[i] = 1 + static_cast<Label>(i % 4);
  const std::vector<double> weights(gold.size(), 1.0);
  for (auto _ : state) {
    const ForwardResult fwd = forward(params, x);
    benchmark::DoNotOptimize(backward(params, fwd, gold, weights));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Forward)->ArgsProduct({{64, 1024}, {0, 32}});
BENCHMARK(BM_ForwardBackward)->ArgsProduct({{64, 1024}, {0, 32}});
