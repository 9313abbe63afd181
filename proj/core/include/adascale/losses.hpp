#pragma once

// Loss strategies. Every strategy reduces to per-instance weights applied to
// the gold-class negative log-likelihood, so the backward pass is shared:
//
//   loss = (1/B) sum_i w_i * (-log p_i)
//
// Weights are constants with respect to the parameters at each step.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "adascale/metrics.hpp"
#include "adascale/model.hpp"

namespace adascale {

namespace strategy {

struct Vanilla {
  friend bool operator==(const Vanilla&, const Vanilla&) = default;
};

/// Negatives scaled by the batch estimate of the F-beta utility ratio.
struct Adaptive {
  Beta beta;
  friend bool operator==(const Adaptive& a, const Adaptive& b) {
    return a.beta.value() == b.beta.value();
  }
};

/// Negatives scaled by a fixed cost.
struct Static {
  double negative_cost = 1.0;
  friend bool operator==(const Static&, const Static&) = default;
};

/// Every instance scaled by (1 - p)^gamma.
struct Focal {
  double gamma = 2.0;
  friend bool operator==(const Focal&, const Focal&) = default;
};

}  // namespace strategy

using LossStrategy =
    std::variant<strategy::Vanilla, strategy::Adaptive, strategy::Static, strategy::Focal>;

/// Throws ArgumentError for a non-positive cost or negative gamma.
void validate(const LossStrategy& s);
std::string describe(const LossStrategy& s);

struct LossOutput {
  double loss = 0.0;
  std::vector<double> instance_weights;
  std::optional<double> w_used;  // Adaptive only
  bool skipped = false;          // Adaptive batch without positives
};

/// Gold-class probability of each row.
std::vector<double> gold_probabilities(const Matrix& probs, std::span<const Label> gold);

LossOutput compute_loss(const LossStrategy& strategy, const ForwardResult& fwd,
                        std::span<const Label> gold, Label negative_label = 0);

/// (1/B) sum_i w_i * (-log probs(i, gold_i)) with the given weights.
double weighted_nll(const Matrix& probs, std::span<const Label> gold,
                    std::span<const double> weights);

}  // namespace adascale
