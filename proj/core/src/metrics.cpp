#include "adascale/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

namespace adascale {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

// Predicted-positive count: false positives from the negative class, plus
// positive-positive errors, plus true positives.
double predicted_positive(const ConfusionStats& s) { return s.n - s.tn + s.pe + s.tp; }

double fbeta_denominator(const ConfusionStats& s, Beta beta) {
  return beta.squared() * s.p + predicted_positive(s);
}

}  // namespace

bool ConfusionStats::valid() const noexcept {
  if (!finite_nonneg(p) || !finite_nonneg(n) || !finite_nonneg(tp) || !finite_nonneg(tn) ||
      !finite_nonneg(pe)) {
    return false;
  }
  return tp <= p && tn <= n && pe <= p - tp;
}

void ConfusionStats::validate() const {
  if (!valid()) {
    throw ArgumentError("invalid ConfusionStats: p=" + std::to_string(p) +
                        " n=" + std::to_string(n) + " tp=" + std::to_string(tp) +
                        " tn=" + std::to_string(tn) + " pe=" + std::to_string(pe));
  }
}

double PerClassCounts::total() const noexcept {
  double sum = 0.0;
  for (const auto& [label, count] : tp_by_class) sum += count;
  return sum;
}

Beta::Beta(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ArgumentError("beta must be a positive finite real, got " + std::to_string(value));
  }
}

std::pair<ConfusionStats, PerClassCounts> confusion_from_predictions(
    std::span<const Label> gold, std::span<const Label> pred, Label negative_label) {
  if (gold.size() != pred.size()) {
    throw ArgumentError("gold and pred lengths differ: " + std::to_string(gold.size()) + " vs " +
                        std::to_string(pred.size()));
  }
  ConfusionStats stats;
  PerClassCounts per_class;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const Label g = gold[i];
    const Label y = pred[i];
    if (g < 0 || y < 0) throw ArgumentError("labels must be non-negative");
    if (g == negative_label) {
      stats.n += 1.0;
      if (y == negative_label) stats.tn += 1.0;
      continue;
    }
    stats.p += 1.0;
    per_class.tp_by_class.try_emplace(g, 0.0);
    if (y == g) {
      stats.tp += 1.0;
      per_class.tp_by_class[g] += 1.0;
    } else if (y != negative_label) {
      stats.pe += 1.0;
    }
  }
  return {stats, per_class};
}

double precision(const ConfusionStats& stats) {
  stats.validate();
  const double denom = predicted_positive(stats);
  return denom > 0.0 ? stats.tp / denom : 0.0;
}

double recall(const ConfusionStats& stats) {
  stats.validate();
  return stats.p > 0.0 ? stats.tp / stats.p : 0.0;
}

double f_beta(const ConfusionStats& stats, Beta beta) {
  stats.validate();
  if (stats.tp == 0.0) return 0.0;
  return (1.0 + beta.squared()) * stats.tp / fbeta_denominator(stats, beta);
}

double accuracy(const ConfusionStats& stats) {
  stats.validate();
  const double total = stats.p + stats.n;
  if (!(total > 0.0)) throw ArgumentError("accuracy requires p + n > 0");
  return (stats.tp + stats.tn) / total;
}

MarginalUtility marginal_utility_accuracy(const ConfusionStats& stats) {
  stats.validate();
  const double total = stats.p + stats.n;
  if (!(total > 0.0)) throw ArgumentError("marginal accuracy utility requires p + n > 0");
  return {1.0 / total, 1.0 / total};
}

MarginalUtility marginal_utility_fbeta(const ConfusionStats& stats, Beta beta) {
  stats.validate();
  const double d = fbeta_denominator(stats, beta);
  if (!(d > 0.0)) throw ArgumentError("F-beta denominator is zero");
  const double scale = (1.0 + beta.squared()) / (d * d);
  const double rest = beta.squared() * stats.p + stats.n - stats.tn + stats.pe;
  return {scale * rest, scale * stats.tp};
}

bool micro_f_invariance_check(const PerClassCounts& per_class, const ConfusionStats& stats,
                              Beta beta) {
  stats.validate();
  const double total = per_class.total();
  if (std::abs(total - stats.tp) > 1e-9 * std::max(1.0, stats.tp)) {
    throw ArgumentError("per-class TP sum " + std::to_string(total) +
                        " does not match stats.tp " + std::to_string(stats.tp));
  }
  // Concentrate the whole pooled TP on each class in turn, then spread it
  // evenly; every alternative must score identically.
  auto score = [&](const PerClassCounts& alt) {
    ConfusionStats s = stats;
    s.tp = std::min(alt.total(), s.p - s.pe);
    return f_beta(s, beta);
  };
  const double reference = score(per_class);
  for (const auto& [label, count] : per_class.tp_by_class) {
    PerClassCounts alt;
    for (const auto& [other, c] : per_class.tp_by_class) alt.tp_by_class[other] = 0.0;
    alt.tp_by_class[label] = total;
    if (score(alt) != reference) return false;
  }
  if (!per_class.tp_by_class.empty()) {
    PerClassCounts even;
    const double share = total / static_cast<double>(per_class.tp_by_class.size());
    double assigned = 0.0;
    auto last = std::prev(per_class.tp_by_class.end())->first;
    for (const auto& [label, count] : per_class.tp_by_class) {
      even.tp_by_class[label] = label == last ? total - assigned : share;
      assigned += share;
    }
    if (std::abs(score(even) - reference) > 1e-15) return false;
  }
  return true;
}

}  // namespace adascale
