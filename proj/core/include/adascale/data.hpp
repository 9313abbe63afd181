#pragma once

// Datasets, the synthetic sparse-detection generator, file I/O, and epoch
// batching (uniform, stratified, under-sampled).
//
// Label 0 is the negative (background) class; labels 1..k-1 are positive.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "adascale/metrics.hpp"
#include "adascale/model.hpp"

namespace adascale {

inline constexpr Label kNegativeLabel = 0;

struct Dataset {
  Matrix features;            // n x d
  std::vector<Label> labels;  // n
  std::size_t k = 0;          // classes including the negative one

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
  std::size_t positives() const noexcept;

  /// Rows `indices`, in order.
  Matrix rows(const std::vector<std::size_t>& indices) const;
  std::vector<Label> labels_at(const std::vector<std::size_t>& indices) const;

  /// Throws ArgumentError if labels are out of range, rows are non-finite,
  /// or the dataset is empty.
  void validate() const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.k == b.k && a.labels == b.labels && a.features == b.features;
  }
};

struct GeneratorConfig {
  std::size_t n = 10000;
  std::size_t d = 20;
  std::size_t k = 4;
  double positive_rate = 0.02;
  std::size_t negative_modes = 3;
  double class_separation = 4.0;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t positive_count() const;
};

/// Gaussian-cluster generator. Each positive class is a single cluster; the
/// negative class is an equal-weight mixture of `negative_modes` clusters.
/// Cluster centres are fixed by `config.seed`, so several splits drawn from
/// one generator share a distribution.
class SyntheticGenerator {
 public:
  explicit SyntheticGenerator(GeneratorConfig config);

  const GeneratorConfig& config() const noexcept { return config_; }
  const Matrix& positive_centers() const noexcept { return positive_centers_; }
  const Matrix& negative_centers() const noexcept { return negative_centers_; }

  /// Draws `n` instances with exactly round(positive_rate * n) positives.
  /// `stream` selects an independent sample (e.g. 0 train, 1 dev, 2 test).
  /// If `component` is given it receives, per row, the cluster index: the
  /// mode index for negatives and label-1 for positives.
  Dataset sample(std::size_t n, std::uint64_t stream,
                 std::vector<std::size_t>* component = nullptr) const;

 private:
  GeneratorConfig config_;
  Matrix positive_centers_;  // (k-1) x d
  Matrix negative_centers_;  // modes x d
};

/// Draws `config.n` instances on stream 0.
Dataset generate(const GeneratorConfig& config);

struct Splits {
  Dataset train;
  Dataset dev;
  Dataset test;
};

Splits generate_splits(const GeneratorConfig& config, std::size_t n_dev, std::size_t n_test);

enum class DataFormat { Csv, Jsonl };
DataFormat format_from_path(const std::string& path);
DataFormat format_from_string(const std::string& name);

/// Reads a dataset. k is max label + 1. Errors are LoadError with the
/// offending line number.
Dataset load(const std::string& path, DataFormat format);
void save(const Dataset& dataset, const std::string& path, DataFormat format);

namespace sampler {

struct Uniform {};

/// Every batch gets at least `min_positives_per_batch` positives if the
/// epoch has enough of them; otherwise positives are spread one per batch
/// and a warning is recorded.
struct Stratified {
  std::size_t min_positives_per_batch = 1;
};

/// Keeps all positives and a fresh random subset of
/// round(neg_to_pos_ratio * P) negatives each epoch.
struct UnderSample {
  double neg_to_pos_ratio = 1.0;
};

}  // namespace sampler

using SamplerKind = std::variant<sampler::Uniform, sampler::Stratified, sampler::UnderSample>;

void validate(const SamplerKind& s);
std::string describe(const SamplerKind& s);

struct EpochPlan {
  std::vector<std::vector<std::size_t>> batches;
  std::vector<std::string> warnings;

  std::size_t instance_count() const noexcept;
};

EpochPlan batches(const Dataset& dataset, const SamplerKind& sampler, std::size_t batch_size,
                  std::uint64_t seed);

}  // namespace adascale
