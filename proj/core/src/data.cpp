#include "adascale/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adascale/errors.hpp"
#include "adascale/rng.hpp"

namespace adascale {

namespace {

// Splits `total` into `parts` near-equal shares, larger shares first.
std::vector<std::size_t> even_split(std::size_t total, std::size_t parts) {
  std::vector<std::size_t> shares(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++shares[i];
  return shares;
}

Matrix random_centers(std::size_t count, std::size_t d, double radius, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix centers(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < centers.rows(); ++r) {
    for (Eigen::Index c = 0; c < centers.cols(); ++c) centers(r, c) = gauss(rng);
    centers.row(r) *= radius / centers.row(r).norm();
  }
  return centers;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // Tolerate surrounding whitespace and a trailing CR.
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <class T>
T parse_number(const std::string& token, std::size_t line, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw LoadError(std::string("bad ") + what + " '" + token + "'", line);
  }
  return v;
}

Dataset assemble(std::vector<std::vector<double>> rows, std::vector<Label> labels) {
  if (rows.empty()) throw LoadError("dataset has no instances");
  Dataset ds;
  const std::size_t d = rows.front().size();
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  ds.k = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
  ds.labels = std::move(labels);
  return ds;
}

Dataset load_csv(std::istream& in) {
  std::string text;
  std::size_t line = 0;
  if (!std::getline(in, text)) throw LoadError("empty file", 1);
  ++line;
  const auto header = split_csv(text);
  if (header.size() < 2 || header.back() != "label") {
    throw LoadError("header must be f0,...,f{d-1},label", line);
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != "f" + std::to_string(j)) {
      throw LoadError("expected column 'f" + std::to_string(j) + "', got '" + header[j] + "'",
                      line);
    }
  }
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(text);
    if (cells.size() != d + 1) {
      throw LoadError("expected " + std::to_string(d + 1) + " columns, got " +
                          std::to_string(cells.size()),
                      line);
    }
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = parse_number<double>(cells[j], line, "feature");
      if (!std::isfinite(row[j])) throw LoadError("non-finite feature", line);
    }
    const Label label = parse_number<Label>(cells[d], line, "label");
    if (label < 0) throw LoadError("label must be non-negative, got " + cells[d], line);
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  return assemble(std::move(rows), std::move(labels));
}

Dataset load_jsonl(std::istream& in) {
  std::string text;
  std::size_t line = 0;
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw LoadError(std::string("malformed JSON: ") + e.what(), line);
    }
    if (!obj.is_object() || !obj.contains("features") || !obj.contains("label")) {
      throw LoadError("record needs 'features' and 'label'", line);
    }
    const auto& feats = obj["features"];
    const auto& lab = obj["label"];
    if (!feats.is_array() || feats.empty()) throw LoadError("'features' must be a non-empty array", line);
    if (!lab.is_number_integer()) throw LoadError("'label' must be an integer", line);
    std::vector<double> row;
    for (const auto& v : feats) {
      if (!v.is_number()) throw LoadError("feature is not a number", line);
      row.push_back(v.get<double>());
      if (!std::isfinite(row.back())) throw LoadError("non-finite feature", line);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw LoadError("feature width differs from earlier records", line);
    }
    const auto label = lab.get<long long>();
    if (label < 0) throw LoadError("label must be non-negative", line);
    rows.push_back(std::move(row));
    labels.push_back(static_cast<Label>(label));
  }
  return assemble(std::move(rows), std::move(labels));
}

}  // namespace

std::size_t Dataset::positives() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](Label l) { return l != kNegativeLabel; }));
}

Matrix Dataset::rows(const std::vector<std::size_t>& indices) const {
  Matrix out(static_cast<Eigen::Index>(indices.size()), features.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(indices[i]));
  }
  return out;
}

std::vector<Label> Dataset::labels_at(const std::vector<std::size_t>& indices) const {
  std::vector<Label> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) out[i] = labels[indices[i]];
  return out;
}

void Dataset::validate() const {
  if (labels.empty()) throw ArgumentError("dataset is empty");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw ArgumentError("feature rows and labels differ in count");
  }
  if (features.cols() == 0) throw ArgumentError("dataset has zero features");
  for (Label l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= k) {
      throw ArgumentError("label " + std::to_string(l) + " outside [0, " +
                          std::to_string(k) + ")");
    }
  }
  if (!features.allFinite()) throw ArgumentError("dataset has non-finite features");
}

void GeneratorConfig::validate() const {
  if (n == 0 || d == 0) throw ArgumentError("generator needs n >= 1 and d >= 1");
  if (k < 2) throw ArgumentError("generator needs k >= 2");
  if (!(positive_rate > 0.0 && positive_rate < 1.0)) {
    throw ArgumentError("positive_rate must lie in (0, 1)");
  }
  if (negative_modes == 0) throw ArgumentError("negative_modes must be >= 1");
  if (!(class_separation > 0.0) || !(noise_scale > 0.0)) {
    throw ArgumentError("class_separation and noise_scale must be positive");
  }
  if (positive_count() < k - 1) {
    throw ArgumentError("positive_rate * n must leave at least one instance per positive class");
  }
}

std::size_t GeneratorConfig::positive_count() const {
  return static_cast<std::size_t>(std::llround(positive_rate * static_cast<double>(n)));
}

SyntheticGenerator::SyntheticGenerator(GeneratorConfig config) : config_(config) {
  config_.validate();
  Rng rng = make_rng(config_.seed, {stream::kGeneratorCenters});
  negative_centers_ = random_centers(config_.negative_modes, config_.d, config_.class_separation, rng);
  positive_centers_ = random_centers(config_.k - 1, config_.d, config_.class_separation, rng);
}

Dataset SyntheticGenerator::sample(std::size_t n, std::uint64_t stream,
                                   std::vector<std::size_t>* component) const {
  GeneratorConfig sized = config_;
  sized.n = n;
  sized.validate();

  const std::size_t positives = sized.positive_count();
  const auto per_class = even_split(positives, config_.k - 1);
  const auto per_mode = even_split(n - positives, config_.negative_modes);

  std::vector<Label> labels;
  std::vector<std::size_t> source;  // cluster index within its class group
  labels.reserve(n);
  source.reserve(n);
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    labels.insert(labels.end(), per_class[c], static_cast<Label>(c + 1));
    source.insert(source.end(), per_class[c], c);
  }
  for (std::size_t m = 0; m < per_mode.size(); ++m) {
    labels.insert(labels.end(), per_mode[m], kNegativeLabel);
    source.insert(source.end(), per_mode[m], m);
  }

  Rng rng = make_rng(config_.seed, {stream::kGeneratorSample, stream});
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  std::normal_distribution<double> gauss(0.0, config_.noise_scale);
  Dataset ds;
  ds.k = config_.k;
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(config_.d));
  ds.labels.resize(n);
  if (component) component->assign(n, 0);
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t i = order[row];
    const Matrix& centers = labels[i] == kNegativeLabel ? negative_centers_ : positive_centers_;
    const auto r = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
      ds.features(r, j) = centers(static_cast<Eigen::Index>(source[i]), j) + gauss(rng);
    }
    ds.labels[row] = labels[i];
    if (component) (*component)[row] = source[i];
  }
  return ds;
}

Dataset generate(const GeneratorConfig& config) {
  return SyntheticGenerator(config).sample(config.n, 0);
}

Splits generate_splits(const GeneratorConfig& config, std::size_t n_dev, std::size_t n_test) {
  SyntheticGenerator gen(config);
  return {gen.sample(config.n, 0), gen.sample(n_dev, 1), gen.sample(n_test, 2)};
}

DataFormat format_from_string(const std::string& name) {
  if (name == "csv") return DataFormat::Csv;
  if (name == "jsonl") return DataFormat::Jsonl;
  throw ArgumentError("unknown data format '" + name + "' (expected csv or jsonl)");
}

DataFormat format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".jsonl") return DataFormat::Jsonl;
  return DataFormat::Csv;
}

Dataset load(const std::string& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  Dataset ds = format == DataFormat::Csv ? load_csv(in) : load_jsonl(in);
  try {
    ds.validate();
  } catch (const ArgumentError& e) {
    throw LoadError(path + ": " + e.what());
  }
  return ds;
}

void save(const Dataset& dataset, const std::string& path, DataFormat format) {
  dataset.validate();
  std::ofstream out(path);
  if (!out) throw LoadError("cannot open " + path + " for writing");
  const auto rows = dataset.features.rows();
  const auto cols = dataset.features.cols();
  if (format == DataFormat::Csv) {
    for (Eigen::Index j = 0; j < cols; ++j) out << 'f' << j << ',';
    out << "label\n";
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) out << format_double(dataset.features(i, j)) << ',';
      out << dataset.labels[static_cast<std::size_t>(i)] << '\n';
    }
    return;
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    out << "{\"features\":[";
    for (Eigen::Index j = 0; j < cols; ++j) {
      out << (j == 0 ? "" : ",") << format_double(dataset.features(i, j));
    }
    out << "],\"label\":" << dataset.labels[static_cast<std::size_t>(i)] << "}\n";
  }
}

void validate(const SamplerKind& s) {
  if (const auto* st = std::get_if<sampler::Stratified>(&s); st && st->min_positives_per_batch < 1) {
    throw ArgumentError("stratified sampler needs min_positives_per_batch >= 1");
  }
  if (const auto* us = std::get_if<sampler::UnderSample>(&s);
      us && !(us->neg_to_pos_ratio > 0.0 && std::isfinite(us->neg_to_pos_ratio))) {
    throw ArgumentError("under-sampling ratio must be positive");
  }
}

std::string describe(const SamplerKind& s) {
  if (const auto* st = std::get_if<sampler::Stratified>(&s)) {
    return "stratified(min=" + std::to_string(st->min_positives_per_batch) + ")";
  }
  if (const auto* us = std::get_if<sampler::UnderSample>(&s)) {
    std::ostringstream out;
    out << "undersample(ratio=" << us->neg_to_pos_ratio << ")";
    return out.str();
  }
  return "uniform";
}

std::size_t EpochPlan::instance_count() const noexcept {
  std::size_t total = 0;
  for (const auto& b : batches) total += b.size();
  return total;
}

namespace {

std::vector<std::vector<std::size_t>> chunk(const std::vector<std::size_t>& order,
                                            std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t at = 0; at < order.size(); at += batch_size) {
    const std::size_t end = std::min(order.size(), at + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(at),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

EpochPlan stratified(const std::vector<std::size_t>& pos, const std::vector<std::size_t>& neg,
                     std::size_t min_pos, std::size_t batch_size, Rng& rng) {
  EpochPlan plan;
  const std::size_t total = pos.size() + neg.size();
  const std::size_t n_batches = (total + batch_size - 1) / batch_size;
  std::vector<std::size_t> capacity(n_batches, batch_size);
  if (total % batch_size != 0) capacity.back() = total % batch_size;

  if (pos.size() < n_batches * min_pos) {
    plan.warnings.push_back("stratified sampler: " + std::to_string(pos.size()) +
                            " positives cannot give " + std::to_string(min_pos) +
                            " per batch to " + std::to_string(n_batches) +
                            " batches; spreading them best-effort");
  }

  // Deal positives round-robin over batches with spare capacity, then fill
  // the remaining slots with negatives.
  plan.batches.assign(n_batches, {});
  std::size_t b = 0;
  for (std::size_t idx : pos) {
    while (plan.batches[b].size() >= capacity[b]) b = (b + 1) % n_batches;
    plan.batches[b].push_back(idx);
    b = (b + 1) % n_batches;
  }
  std::size_t next_neg = 0;
  for (std::size_t i = 0; i < n_batches; ++i) {
    while (plan.batches[i].size() < capacity[i]) plan.batches[i].push_back(neg[next_neg++]);
    std::shuffle(plan.batches[i].begin(), plan.batches[i].end(), rng);
  }
  std::shuffle(plan.batches.begin(), plan.batches.end(), rng);
  return plan;
}

}  // namespace

EpochPlan batches(const Dataset& dataset, const SamplerKind& sampler, std::size_t batch_size,
                  std::uint64_t seed) {
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  validate(sampler);
  Rng rng = make_rng(seed, {stream::kBatches});

  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (dataset.labels[i] == kNegativeLabel ? neg : pos).push_back(i);
  }

  if (const auto* st = std::get_if<sampler::Stratified>(&sampler)) {
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    return stratified(pos, neg, st->min_positives_per_batch, batch_size, rng);
  }

  EpochPlan plan;
  std::vector<std::size_t> order;
  if (const auto* us = std::get_if<sampler::UnderSample>(&sampler)) {
    const auto wanted = static_cast<std::size_t>(
        std::llround(us->neg_to_pos_ratio * static_cast<double>(pos.size())));
    const std::size_t keep = std::min(wanted, neg.size());
    if (keep < wanted) {
      plan.warnings.push_back("under-sampler: only " + std::to_string(neg.size()) +
                              " negatives available, wanted " + std::to_string(wanted));
    }
    std::shuffle(neg.begin(), neg.end(), rng);
    order = pos;
    order.insert(order.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(keep));
  } else {
    order.resize(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  }
  std::shuffle(order.begin(), order.end(), rng);
  plan.batches = chunk(order, batch_size);
  return plan;
}

}  // namespace adascale
