#pragma once

// Adaptive scaling weight: the ratio of the marginal F-beta utility of one
// more true negative to that of one more true positive. The exact form uses
// dataset confusion counts; the batch form replaces TP and TN with their
// expected values under the model's gold-class probabilities and drops PE.

#include <cstddef>
#include <span>
#include <vector>

#include "adascale/metrics.hpp"

namespace adascale {

/// Gold-class probabilities for one mini-batch together with the gold
/// positive/negative split. Construct through `make`, which validates.
class BatchPrediction {
 public:
  static BatchPrediction make(std::vector<double> gold_probs, std::vector<bool> is_positive);

  std::span<const double> gold_probs() const noexcept { return gold_probs_; }
  const std::vector<bool>& is_positive() const noexcept { return is_positive_; }
  std::size_t size() const noexcept { return gold_probs_.size(); }

 private:
  BatchPrediction() = default;
  std::vector<double> gold_probs_;
  std::vector<bool> is_positive_;
};

struct ScalingWeight {
  double value = 0.0;
};

struct BatchCounts {
  double tp = 0.0;         // sum of gold probabilities over positives
  double tn = 0.0;         // sum of gold probabilities over negatives
  std::size_t p = 0;
  std::size_t n = 0;
};

/// TP / (b^2 P + N - TN + PE). Throws ArgumentError on a zero denominator.
ScalingWeight w_exact(const ConfusionStats& stats, Beta beta = Beta{});

BatchCounts batch_expected_counts(const BatchPrediction& batch);

/// TP_B / (b^2 P_B + N_B - TN_B) on expected batch counts.
/// Throws ArgumentError on a zero denominator.
ScalingWeight w_batch(const BatchPrediction& batch, Beta beta = Beta{});

}  // namespace adascale
