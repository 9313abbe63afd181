#include <benchmark/benchmark.h>

#include <random>

#include "adascale/losses.hpp"
#include "adascale/scaling.hpp"

using namespace adascale;

namespace {

struct Batch {
  ForwardResult fwd;
  std::vector<Label> gold;
};

Batch make_batch(std::size_t size, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 2.0);
  Matrix z(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
  Batch b;
  b.fwd.probs = softmax_rows(z);
  std::uniform_int_distribution<int> cls(1, static_cast<int>(k) - 1);
  for (std::size_t i = 0; i < size; ++i) b.gold.push_back(i % 16 == 0 ? cls(rng) : 0);
  return b;
}

template <class S>
void BM_ComputeLoss(benchmark::State& state, S s) {
  const Batch b = make_batch(static_cast<std::size_t>(state.range(0)), 5, 1);
  const LossStrategy strategy = s;
  for (auto _ : state) benchmark::DoNotOptimize(compute_loss(strategy, b.fwd, b.gold));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_WBatch(benchmark::State& state) {
  const Batch b = make_batch(static_cast<std::size_t>(state.range(0)), 5, 2);
  const auto probs = gold_probabilities(b.fwd.probs, b.gold);
  std::vector<bool> positive;
  for (Label g : b.gold) positive.push_back(g != 0);
  const auto batch = BatchPrediction::make(probs, positive);
  for (auto _ : state) benchmark::DoNotOptimize(w_batch(batch, Beta(1.0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_ComputeLoss, vanilla, strategy::Vanilla{})->Range(64, 4096);
BENCHMARK_CAPTURE(BM_ComputeLoss, adaptive, strategy::Adaptive{Beta(1.0)})->Range(64, 4096);
BENCHMARK_CAPTURE(BM_ComputeLoss, focal, strategy::Focal{2.0})->Range(64, 4096);
BENCHMARK(BM_WBatch)->Range(64, 4096);
