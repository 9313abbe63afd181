#pragma once

// Confusion bookkeeping and the detection metrics built on it.
//
// Positive classes are every label except `negative_label`. All metrics are
// micro-averaged: per-class true positives are pooled into a single TP before
// any formula is applied.

#include <map>
#include <span>
#include <utility>

#include "adascale/errors.hpp"

namespace adascale {

using Label = int;

/// Confusion quantities for a detection task. Fields are reals so that the
/// same type can carry the expected (soft) counts used during training.
struct ConfusionStats {
  double p = 0.0;   // gold positives
  double n = 0.0;   // gold negatives
  double tp = 0.0;  // correct positives, pooled over positive classes
  double tn = 0.0;  // correct negatives
  double pe = 0.0;  // gold positive predicted as a different positive class

  /// Throws ArgumentError if any range invariant is violated.
  void validate() const;
  bool valid() const noexcept;

  friend bool operator==(const ConfusionStats&, const ConfusionStats&) = default;
};

/// Per-class true-positive counts, keyed by positive label.
struct PerClassCounts {
  std::map<Label, double> tp_by_class;

  double total() const noexcept;
};

/// The F-beta trade-off factor. beta > 0.
class Beta {
 public:
  constexpr Beta() = default;
  explicit Beta(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr double squared() const noexcept { return value_ * value_; }

 private:
  double value_ = 1.0;
};

struct MarginalUtility {
  double mu_tp = 0.0;
  double mu_tn = 0.0;
};

/// Tallies confusion counts. `gold` and `pred` must have equal length.
std::pair<ConfusionStats, PerClassCounts> confusion_from_predictions(
    std::span<const Label> gold, std::span<const Label> pred,
    Label negative_label = 0);

/// TP / (N - TN + PE + TP); 0 when nothing was predicted positive.
double precision(const ConfusionStats& stats);

/// TP / P; 0 when P = 0.
double recall(const ConfusionStats& stats);

/// (1 + b^2) TP / (b^2 P + N - TN + PE + TP); 0 when TP = 0.
double f_beta(const ConfusionStats& stats, Beta beta = Beta{});

/// (TP + TN) / (P + N). Requires P + N > 0.
double accuracy(const ConfusionStats& stats);

/// Partial derivatives of accuracy w.r.t. TP and TN. Both equal 1 / (P + N).
MarginalUtility marginal_utility_accuracy(const ConfusionStats& stats);

/// Partial derivatives of F-beta w.r.t. TP and TN, treating both as reals.
/// Requires b^2 P + N - TN + PE + TP > 0.
MarginalUtility marginal_utility_fbeta(const ConfusionStats& stats, Beta beta = Beta{});

/// Returns true iff F-beta computed from the pooled stats is unchanged when
/// the per-class TP split is replaced by any other split with the same total.
/// Throws ArgumentError if `per_class` does not sum to `stats.tp`.
bool micro_f_invariance_check(const PerClassCounts& per_class, const ConfusionStats& stats,
                              Beta beta = Beta{});

}  // namespace adascale
