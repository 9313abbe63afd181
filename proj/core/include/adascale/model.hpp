#pragma once

// Small softmax classifiers with hand-written forward and backward passes.
// Label k-1 is not special here; the model only sees class indices 0..k-1.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "adascale/metrics.hpp"

namespace adascale {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Activation { Tanh, Relu };

struct LinearArch {
  friend bool operator==(const LinearArch&, const LinearArch&) = default;
};

struct MlpArch {
  std::size_t hidden = 32;
  Activation activation = Activation::Tanh;
  friend bool operator==(const MlpArch&, const MlpArch&) = default;
};

using Architecture = std::variant<LinearArch, MlpArch>;

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);
std::string describe(const Architecture& arch);

struct Layer {
  Matrix weight;  // fan_out x fan_in
  Vector bias;    // fan_out
};

/// Weights of a linear or one-hidden-layer softmax classifier. Gradients use
/// the same type.
struct ModelParams {
  Architecture arch = LinearArch{};
  std::size_t input_dim = 0;
  std::size_t num_classes = 0;
  std::vector<Layer> layers;

  /// Glorot-uniform weights, zero biases, drawn from `seed`.
  static ModelParams init(const Architecture& arch, std::size_t input_dim,
                          std::size_t num_classes, std::uint64_t seed);
  /// All-zero parameters of the given shape.
  static ModelParams zeros(const Architecture& arch, std::size_t input_dim,
                           std::size_t num_classes);

  ModelParams zeros_like() const { return zeros(arch, input_dim, num_classes); }
  std::size_t parameter_count() const;

  /// Layer-by-layer, weights (row-major) then bias.
  Vector flatten() const;
  void assign(const Vector& flat);

  bool all_finite() const;
};

struct ForwardResult {
  Matrix probs;  // batch x k, rows on the simplex

  // Cached for backward.
  Matrix input;
  Matrix hidden_pre;
  Matrix hidden;
};

/// Row-wise max-shifted softmax.
Matrix softmax_rows(const Matrix& logits);

Matrix logits(const ModelParams& params, const Matrix& features);
ForwardResult forward(const ModelParams& params, const Matrix& features);

/// Gradient of -(1/B) sum_i w_i log probs(i, gold_i).
ModelParams backward(const ModelParams& params, const ForwardResult& fwd,
                     std::span<const Label> gold, std::span<const double> instance_weights);

/// Row-wise argmax, ties to the lowest class index.
std::vector<Label> argmax_rows(const Matrix& probs);
std::vector<Label> predict(const ModelParams& params, const Matrix& features);

/// Text checkpoint; see docs/checkpoint_format.md.
void save_checkpoint(const ModelParams& params, std::ostream& out);
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(std::istream& in);
ModelParams load_checkpoint(const std::string& path);

}  // namespace adascale
