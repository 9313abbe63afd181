#pragma once

// Mini-batch training with dev-set model selection.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adascale/data.hpp"
#include "adascale/losses.hpp"
#include "adascale/metrics.hpp"
#include "adascale/model.hpp"

namespace adascale {

namespace optim {

struct Sgd {
  double lr = 0.01;
  double momentum = 0.0;
};

struct Adam {
  double lr = 1e-3;
  double b1 = 0.9;
  double b2 = 0.999;
  double eps = 1e-8;
};

}  // namespace optim

using OptimizerConfig = std::variant<optim::Sgd, optim::Adam>;

/// Applies one update per call; holds moment estimates between calls.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::size_t parameter_count);
  void step(ModelParams& params, const ModelParams& grad);

 private:
  OptimizerConfig config_;
  Vector first_;
  Vector second_;
  std::size_t steps_ = 0;
};

struct TrainConfig {
  OptimizerConfig optimizer = optim::Adam{};
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  SamplerKind sampler = sampler::Stratified{1};
  LossStrategy strategy = strategy::Vanilla{};
  std::uint64_t seed = 0;
  Beta eval_beta;
  std::optional<std::size_t> early_stop_patience;

  void validate() const;
};

struct EvalResult {
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  ConfusionStats stats;
};

struct EpochRecord {
  double train_loss = 0.0;  // mean over the epoch's non-skipped steps
  EvalResult dev;
};

struct RunReport {
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  std::vector<double> w_trace;  // per-step adaptive weight, Adaptive only
  std::size_t steps = 0;
  std::size_t skipped_steps = 0;
  std::size_t best_epoch = 0;
  double best_dev_f = 0.0;
  EvalResult test;
  bool valid = true;
  std::string diagnostic;
  std::vector<std::string> warnings;
  double wall_clock_seconds = 0.0;  // not persisted; see harness
};

struct TrainResult {
  ModelParams params;
  RunReport report;
};

/// Trains on `train`, keeps the parameters with the best dev F-beta
/// (earliest epoch on ties) and scores them on `test`. Deterministic given
/// `config.seed`. A non-finite loss or parameter aborts the run; the report
/// is returned with `valid = false`.
TrainResult train(const Dataset& train, const Dataset& dev, const Dataset& test,
                  const Architecture& arch, const TrainConfig& config);

EvalResult evaluate(const ModelParams& params, const Dataset& dataset, Beta beta = Beta{});

}  // namespace adascale
