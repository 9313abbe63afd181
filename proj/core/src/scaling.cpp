#include "adascale/scaling.hpp"

#include <cmath>
#include <string>

namespace adascale {

BatchPrediction BatchPrediction::make(std::vector<double> gold_probs,
                                      std::vector<bool> is_positive) {
  if (gold_probs.empty()) throw ArgumentError("batch must not be empty");
  if (gold_probs.size() != is_positive.size()) {
    throw ArgumentError("gold_probs and is_positive lengths differ");
  }
  for (double p : gold_probs) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw ArgumentError("gold probability outside (0, 1]: " + std::to_string(p));
    }
  }
  BatchPrediction batch;
  batch.gold_probs_ = std::move(gold_probs);
  batch.is_positive_ = std::move(is_positive);
  return batch;
}

ScalingWeight w_exact(const ConfusionStats& stats, Beta beta) {
  stats.validate();
  const double denom = beta.squared() * stats.p + stats.n - stats.tn + stats.pe;
  if (!(denom > 0.0)) throw ArgumentError("scaling weight denominator is zero");
  return {stats.tp / denom};
}

BatchCounts batch_expected_counts(const BatchPrediction& batch) {
  BatchCounts counts;
  const auto probs = batch.gold_probs();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (batch.is_positive()[i]) {
      counts.tp += probs[i];
      ++counts.p;
    } else {
      counts.tn += probs[i];
      ++counts.n;
    }
  }
  return counts;
}

ScalingWeight w_batch(const BatchPrediction& batch, Beta beta) {
  const BatchCounts c = batch_expected_counts(batch);
  const double denom =
      beta.squared() * static_cast<double>(c.p) + static_cast<double>(c.n) - c.tn;
  if (!(denom > 0.0)) throw ArgumentError("batch scaling weight denominator is zero");
  return {c.tp / denom};
}

}  // namespace adascale
