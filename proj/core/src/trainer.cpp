#include "adascale/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "adascale/errors.hpp"
#include "adascale/rng.hpp"

namespace adascale {

Optimizer::Optimizer(OptimizerConfig config, std::size_t parameter_count)
    : config_(config),
      first_(Vector::Zero(static_cast<Eigen::Index>(parameter_count))),
      second_(Vector::Zero(static_cast<Eigen::Index>(parameter_count))) {}

void Optimizer::step(ModelParams& params, const ModelParams& grad) {
  Vector theta = params.flatten();
  const Vector g = grad.flatten();
  if (g.size() != first_.size()) throw ArgumentError("optimizer: gradient size mismatch");
  ++steps_;
  if (const auto* sgd = std::get_if<optim::Sgd>(&config_)) {
    first_ = sgd->momentum * first_ + g;
    theta -= sgd->lr * first_;
  } else {
    const auto& adam = std::get<optim::Adam>(config_);
    first_ = adam.b1 * first_ + (1.0 - adam.b1) * g;
    second_ = adam.b2 * second_ + (1.0 - adam.b2) * g.cwiseProduct(g);
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(adam.b1, t);
    const double c2 = 1.0 - std::pow(adam.b2, t);
    theta.array() -=
        adam.lr * (first_.array() / c1) / ((second_.array() / c2).sqrt() + adam.eps);
  }
  params.assign(theta);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  const double lr = std::visit([](const auto& o) { return o.lr; }, optimizer);
  if (!(lr > 0.0)) throw ArgumentError("learning rate must be positive");
  if (early_stop_patience && *early_stop_patience < 1) {
    throw ArgumentError("early_stop_patience must be >= 1 when set");
  }
  adascale::validate(sampler);
  adascale::validate(strategy);
}

EvalResult evaluate(const ModelParams& params, const Dataset& dataset, Beta beta) {
  const auto pred = predict(params, dataset.features);
  const auto [stats, per_class] = confusion_from_predictions(dataset.labels, pred, kNegativeLabel);
  return {precision(stats), recall(stats), f_beta(stats, beta), stats};
}

TrainResult train(const Dataset& train_set, const Dataset& dev, const Dataset& test,
                  const Architecture& arch, const TrainConfig& config) {
  config.validate();
  train_set.validate();
  dev.validate();
  test.validate();
  if (dev.dim() != train_set.dim() || test.dim() != train_set.dim()) {
    throw ArgumentError("train/dev/test feature dimensions differ");
  }
  const std::size_t k = std::max({train_set.k, dev.k, test.k});

  const auto started = std::chrono::steady_clock::now();
  TrainResult result{ModelParams::init(arch, train_set.dim(), k, config.seed), {}};
  RunReport& report = result.report;
  report.seed = config.seed;

  ModelParams params = result.params;
  Optimizer optimizer(config.optimizer, params.parameter_count());
  std::set<std::string> seen_warnings;
  double best_f = -1.0;
  std::size_t since_best = 0;

  auto abort_run = [&](std::string why) {
    report.valid = false;
    report.diagnostic = std::move(why);
  };

  for (std::size_t epoch = 0; epoch < config.epochs && report.valid; ++epoch) {
    const EpochPlan plan = batches(train_set, config.sampler, config.batch_size,
                                   derive_seed(config.seed, {stream::kBatches, epoch}));
    for (const auto& w : plan.warnings) {
      if (seen_warnings.insert(w).second) report.warnings.push_back(w);
    }

    double loss_sum = 0.0;
    std::size_t loss_steps = 0;
    for (const auto& batch : plan.batches) {
      const Matrix x = train_set.rows(batch);
      const std::vector<Label> y = train_set.labels_at(batch);
      const ForwardResult fwd = forward(params, x);
      const LossOutput out = compute_loss(config.strategy, fwd, y, kNegativeLabel);
      ++report.steps;
      if (out.w_used) report.w_trace.push_back(*out.w_used);
      if (!std::isfinite(out.loss)) {
        abort_run("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                  std::to_string(report.steps));
        break;
      }
      if (out.skipped) {
        ++report.skipped_steps;
        continue;
      }
      loss_sum += out.loss;
      ++loss_steps;
      optimizer.step(params, backward(params, fwd, y, out.instance_weights));
      if (!params.all_finite()) {
        abort_run("non-finite parameters at epoch " + std::to_string(epoch) + ", step " +
                  std::to_string(report.steps));
        break;
      }
    }
    if (!report.valid) break;

    EpochRecord record;
    record.train_loss = loss_steps > 0 ? loss_sum / static_cast<double>(loss_steps) : 0.0;
    record.dev = evaluate(params, dev, config.eval_beta);
    report.epochs.push_back(record);

    if (record.dev.f_beta > best_f) {
      best_f = record.dev.f_beta;
      report.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (config.early_stop_patience && ++since_best >= *config.early_stop_patience) {
      break;
    }
  }

  if (report.valid) {
    report.best_dev_f = best_f;
    report.test = evaluate(result.params, test, config.eval_beta);
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace adascale
