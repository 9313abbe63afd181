#include "adascale/losses.hpp"

#include <cmath>
#include <sstream>

#include "adascale/errors.hpp"
#include "adascale/scaling.hpp"

namespace adascale {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void validate(const LossStrategy& s) {
  std::visit(Overloaded{
                 [](const strategy::Vanilla&) {},
                 [](const strategy::Adaptive&) {},
                 [](const strategy::Static& st) {
                   if (!(st.negative_cost > 0.0) || !std::isfinite(st.negative_cost)) {
                     throw ArgumentError("static negative_cost must be positive");
                   }
                 },
                 [](const strategy::Focal& f) {
                   if (!(f.gamma >= 0.0) || !std::isfinite(f.gamma)) {
                     throw ArgumentError("focal gamma must be non-negative");
                   }
                 },
             },
             s);
}

std::string describe(const LossStrategy& s) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const strategy::Vanilla&) { out << "vanilla"; },
                 [&](const strategy::Adaptive& a) { out << "adaptive(beta=" << a.beta.value() << ")"; },
                 [&](const strategy::Static& st) { out << "static(cost=" << st.negative_cost << ")"; },
                 [&](const strategy::Focal& f) { out << "focal(gamma=" << f.gamma << ")"; },
             },
             s);
  return out.str();
}

std::vector<double> gold_probabilities(const Matrix& probs, std::span<const Label> gold) {
  if (static_cast<std::size_t>(probs.rows()) != gold.size()) {
    throw ArgumentError("probability rows and gold labels differ in length");
  }
  std::vector<double> out(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] >= probs.cols()) throw ArgumentError("gold label out of range");
    out[i] = probs(static_cast<Eigen::Index>(i), gold[i]);
  }
  return out;
}

double weighted_nll(const Matrix& probs, std::span<const Label> gold,
                    std::span<const double> weights) {
  const std::vector<double> p = gold_probabilities(probs, gold);
  if (weights.size() != p.size()) throw ArgumentError("weight count differs from batch size");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (weights[i] != 0.0) total += weights[i] * -std::log(p[i]);
  }
  return total / static_cast<double>(p.size());
}

LossOutput compute_loss(const LossStrategy& strategy, const ForwardResult& fwd,
                        std::span<const Label> gold, Label negative_label) {
  if (gold.empty()) throw ArgumentError("compute_loss: empty batch");
  validate(strategy);
  const std::vector<double> p = gold_probabilities(fwd.probs, gold);

  LossOutput out;
  out.instance_weights.assign(gold.size(), 1.0);
  auto scale_negatives = [&](double w) {
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i] == negative_label) out.instance_weights[i] = w;
    }
  };

  std::visit(Overloaded{
                 [](const strategy::Vanilla&) {},
                 [&](const strategy::Static& st) { scale_negatives(st.negative_cost); },
                 [&](const strategy::Focal& f) {
                   for (std::size_t i = 0; i < p.size(); ++i) {
                     out.instance_weights[i] = std::pow(1.0 - p[i], f.gamma);
                   }
                 },
                 [&](const strategy::Adaptive& a) {
                   std::vector<bool> positive(gold.size());
                   bool any_positive = false;
                   for (std::size_t i = 0; i < gold.size(); ++i) {
                     positive[i] = gold[i] != negative_label;
                     any_positive = any_positive || positive[i];
                   }
                   double w = 0.0;
                   if (any_positive) {
                     w = w_batch(BatchPrediction::make(p, positive), a.beta).value;
                   } else {
                     out.skipped = true;
                   }
                   out.w_used = w;
                   scale_negatives(w);
                 },
             },
             strategy);

  out.loss = weighted_nll(fwd.probs, gold, out.instance_weights);
  return out;
}

}  // namespace adascale
