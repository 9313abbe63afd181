#pragma once

// Independent reference computations shared by the unit and acceptance
// suites. Nothing here calls into the library's formula code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "adascale/metrics.hpp"
#include "adascale/model.hpp"

namespace oracle {

using adascale::ConfusionStats;
using adascale::Label;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Random valid stats with integer-valued counts. p, n >= 1.
inline ConfusionStats random_counts(std::mt19937_64& rng, int max_p = 100, int max_n = 500) {
  ConfusionStats s;
  s.p = uniform_int(rng, 1, max_p);
  s.n = uniform_int(rng, 1, max_n);
  s.tp = uniform_int(rng, 0, static_cast<int>(s.p));
  s.tn = uniform_int(rng, 0, static_cast<int>(s.n));
  s.pe = uniform_int(rng, 0, static_cast<int>(s.p - s.tp));
  return s;
}

/// Random valid stats with real-valued counts, leaving at least `margin`
/// of room on each side of tp and tn so that finite differences stay valid.
inline ConfusionStats random_interior(std::mt19937_64& rng, double margin) {
  ConfusionStats s;
  s.p = uniform(rng, 2.0, 100.0);
  s.n = uniform(rng, 2.0, 500.0);
  s.tp = uniform(rng, 1.0, s.p - 2.0 * margin);
  s.tn = uniform(rng, margin, s.n - margin);
  s.pe = uniform(rng, 0.0, s.p - s.tp - margin);
  return s;
}

/// (1+b^2) P R / (b^2 P + R) from separately computed precision and recall.
/// Returns false when the composition is undefined.
inline bool composed_f(const ConfusionStats& s, double beta, double& out) {
  const double predicted = s.n - s.tn + s.pe + s.tp;
  if (predicted <= 0.0 || s.p <= 0.0) return false;
  const double prec = s.tp / predicted;
  const double rec = s.tp / s.p;
  const double b2 = beta * beta;
  if (b2 * prec + rec <= 0.0) return false;
  out = (1.0 + b2) * prec * rec / (b2 * prec + rec);
  return true;
}

struct Tally {
  double p = 0, n = 0, tp = 0, tn = 0, pe = 0;
  std::map<Label, double> tp_by_class;
};

/// O(length * k) tally: one pass per class label.
inline Tally tally(std::span<const Label> gold, std::span<const Label> pred, int k,
                   Label negative = 0) {
  Tally t;
  for (Label c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i] != c) continue;
      if (c == negative) {
        t.n += 1;
        if (pred[i] == negative) t.tn += 1;
      } else {
        t.p += 1;
        t.tp_by_class.try_emplace(c, 0.0);
        if (pred[i] == c) {
          t.tp += 1;
          t.tp_by_class[c] += 1;
        } else if (pred[i] != negative) {
          t.pe += 1;
        }
      }
    }
  }
  return t;
}

/// |a - b| / max(|a|, |b|, floor).
inline double relative_error(double a, double b, double floor = 0.0) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

template <class F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// -(1/B) sum_i w_i log softmax(logits_i)[gold_i], computed without the
/// library's forward pass: logits are built by explicit loops.
inline double reference_weighted_nll(const adascale::ModelParams& params,
                                     const adascale::Matrix& x, std::span<const Label> gold,
                                     std::span<const double> weights) {
  const auto rows = static_cast<std::size_t>(x.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> a(x.row(static_cast<Eigen::Index>(i)).begin(),
                          x.row(static_cast<Eigen::Index>(i)).end());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      const auto& layer = params.layers[l];
      std::vector<double> z(static_cast<std::size_t>(layer.weight.rows()));
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        double acc = layer.bias(r);
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
          acc += layer.weight(r, c) * a[static_cast<std::size_t>(c)];
        }
        z[static_cast<std::size_t>(r)] = acc;
      }
      const bool hidden = l + 1 < params.layers.size();
      if (hidden) {
        const auto& mlp = std::get<adascale::MlpArch>(params.arch);
        for (double& v : z) {
          v = mlp.activation == adascale::Activation::Tanh ? std::tanh(v) : std::max(0.0, v);
        }
      }
      a = std::move(z);
    }
    const double m = *std::max_element(a.begin(), a.end());
    double sum = 0.0;
    for (double v : a) sum += std::exp(v - m);
    const double log_p = a[static_cast<std::size_t>(gold[i])] - m - std::log(sum);
    total += weights[i] * -log_p;
  }
  return total / static_cast<double>(rows);
}

}  // namespace oracle
