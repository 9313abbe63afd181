#include "adascale/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "adascale/errors.hpp"
#include "adascale/rng.hpp"

namespace adascale {

namespace {

struct Shape {
  std::size_t rows;
  std::size_t cols;
};

std::vector<Shape> layer_shapes(const Architecture& arch, std::size_t d, std::size_t k) {
  if (const auto* mlp = std::get_if<MlpArch>(&arch)) {
    return {{mlp->hidden, d}, {k, mlp->hidden}};
  }
  return {{k, d}};
}

void check_shape(const Architecture& arch, std::size_t d, std::size_t k) {
  if (d == 0) throw ArgumentError("input dimension must be positive");
  if (k < 2) throw ArgumentError("a classifier needs at least 2 classes");
  if (const auto* mlp = std::get_if<MlpArch>(&arch); mlp && mlp->hidden == 0) {
    throw ArgumentError("hidden size must be positive");
  }
}

Matrix activate(const Matrix& pre, Activation a) {
  if (a == Activation::Tanh) return pre.array().tanh().matrix();
  return pre.array().max(0.0).matrix();
}

// d(activation)/d(pre) evaluated elementwise, given both pre and post values.
Matrix activation_slope(const Matrix& pre, const Matrix& post, Activation a) {
  if (a == Activation::Tanh) return (1.0 - post.array().square()).matrix();
  return (pre.array() > 0.0).cast<double>().matrix();
}

Matrix affine(const Matrix& x, const Layer& layer) {
  Matrix out = x * layer.weight.transpose();
  out.rowwise() += layer.bias.transpose();
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(const std::string& token, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw LoadError("expected a real number, got '" + token + "'", line);
  }
  return v;
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  throw ArgumentError("unknown activation '" + name + "'");
}

std::string describe(const Architecture& arch) {
  if (const auto* mlp = std::get_if<MlpArch>(&arch)) {
    return "mlp(" + std::to_string(mlp->hidden) + "," + to_string(mlp->activation) + ")";
  }
  return "linear";
}

ModelParams ModelParams::zeros(const Architecture& arch, std::size_t input_dim,
                               std::size_t num_classes) {
  check_shape(arch, input_dim, num_classes);
  ModelParams params;
  params.arch = arch;
  params.input_dim = input_dim;
  params.num_classes = num_classes;
  for (const Shape& s : layer_shapes(arch, input_dim, num_classes)) {
    params.layers.push_back(
        {Matrix::Zero(static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(s.cols)),
         Vector::Zero(static_cast<Eigen::Index>(s.rows))});
  }
  return params;
}

ModelParams ModelParams::init(const Architecture& arch, std::size_t input_dim,
                              std::size_t num_classes, std::uint64_t seed) {
  ModelParams params = zeros(arch, input_dim, num_classes);
  Rng rng = make_rng(seed, {stream::kInit});
  for (Layer& layer : params.layers) {
    const double fan = static_cast<double>(layer.weight.rows() + layer.weight.cols());
    std::uniform_real_distribution<double> dist(-std::sqrt(6.0 / fan), std::sqrt(6.0 / fan));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
    }
  }
  return params;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t total = 0;
  for (const Layer& layer : layers) {
    total += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  return total;
}

Vector ModelParams::flatten() const {
  Vector flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  for (const Layer& layer : layers) {
    flat.segment(at, layer.weight.size()) =
        Eigen::Map<const Vector>(layer.weight.data(), layer.weight.size());
    at += layer.weight.size();
    flat.segment(at, layer.bias.size()) = layer.bias;
    at += layer.bias.size();
  }
  return flat;
}

void ModelParams::assign(const Vector& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw ArgumentError("flat parameter vector has the wrong length");
  }
  Eigen::Index at = 0;
  for (Layer& layer : layers) {
    Eigen::Map<Vector>(layer.weight.data(), layer.weight.size()) =
        flat.segment(at, layer.weight.size());
    at += layer.weight.size();
    layer.bias = flat.segment(at, layer.bias.size());
    at += layer.bias.size();
  }
}

bool ModelParams::all_finite() const {
  for (const Layer& layer : layers) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double shift = logits.row(i).maxCoeff();
    probs.row(i) = (logits.row(i).array() - shift).exp().matrix();
    probs.row(i) /= probs.row(i).sum();
  }
  return probs;
}

ForwardResult forward(const ModelParams& params, const Matrix& features) {
  if (static_cast<std::size_t>(features.cols()) != params.input_dim) {
    throw ArgumentError("feature width " + std::to_string(features.cols()) +
                        " does not match model input dimension " +
                        std::to_string(params.input_dim));
  }
  if (!features.allFinite()) throw ArgumentError("features contain non-finite values");

  ForwardResult fwd;
  fwd.input = features;
  if (const auto* mlp = std::get_if<MlpArch>(&params.arch)) {
    fwd.hidden_pre = affine(features, params.layers[0]);
    fwd.hidden = activate(fwd.hidden_pre, mlp->activation);
    fwd.probs = softmax_rows(affine(fwd.hidden, params.layers[1]));
  } else {
    fwd.probs = softmax_rows(affine(features, params.layers[0]));
  }
  return fwd;
}

Matrix logits(const ModelParams& params, const Matrix& features) {
  if (static_cast<std::size_t>(features.cols()) != params.input_dim) {
    throw ArgumentError("feature width does not match model input dimension");
  }
  if (const auto* mlp = std::get_if<MlpArch>(&params.arch)) {
    return affine(activate(affine(features, params.layers[0]), mlp->activation),
                  params.layers[1]);
  }
  return affine(features, params.layers[0]);
}

ModelParams backward(const ModelParams& params, const ForwardResult& fwd,
                     std::span<const Label> gold, std::span<const double> instance_weights) {
  const Eigen::Index batch = fwd.probs.rows();
  if (static_cast<std::size_t>(batch) != gold.size() ||
      gold.size() != instance_weights.size()) {
    throw ArgumentError("backward: batch, gold and weight sizes differ");
  }
  if (batch == 0) throw ArgumentError("backward: empty batch");
  if (static_cast<std::size_t>(fwd.probs.cols()) != params.num_classes) {
    throw ArgumentError("backward: probability width does not match class count");
  }

  // d loss / d logits = (w_i / B) (probs_i - onehot(gold_i))
  Matrix dlogits = fwd.probs;
  for (Eigen::Index i = 0; i < batch; ++i) {
    const double w = instance_weights[static_cast<std::size_t>(i)];
    const Label g = gold[static_cast<std::size_t>(i)];
    if (!(w >= 0.0)) throw ArgumentError("instance weights must be non-negative");
    if (g < 0 || static_cast<std::size_t>(g) >= params.num_classes) {
      throw ArgumentError("gold label out of range");
    }
    dlogits(i, g) -= 1.0;
    dlogits.row(i) *= w / static_cast<double>(batch);
  }

  ModelParams grad = params.zeros_like();
  if (const auto* mlp = std::get_if<MlpArch>(&params.arch)) {
    Layer& out = grad.layers[1];
    out.weight = dlogits.transpose() * fwd.hidden;
    out.bias = dlogits.colwise().sum().transpose();
    Matrix dhidden = dlogits * params.layers[1].weight;
    Matrix dpre =
        (dhidden.array() * activation_slope(fwd.hidden_pre, fwd.hidden, mlp->activation).array())
            .matrix();
    grad.layers[0].weight = dpre.transpose() * fwd.input;
    grad.layers[0].bias = dpre.colwise().sum().transpose();
  } else {
    grad.layers[0].weight = dlogits.transpose() * fwd.input;
    grad.layers[0].bias = dlogits.colwise().sum().transpose();
  }
  return grad;
}

std::vector<Label> argmax_rows(const Matrix& probs) {
  std::vector<Label> labels(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probs.cols(); ++c) {
      if (probs(i, c) > probs(i, best)) best = c;
    }
    labels[static_cast<std::size_t>(i)] = static_cast<Label>(best);
  }
  return labels;
}

std::vector<Label> predict(const ModelParams& params, const Matrix& features) {
  return argmax_rows(forward(params, features).probs);
}

void save_checkpoint(const ModelParams& params, std::ostream& out) {
  out << "adascale-checkpoint 1\n";
  if (const auto* mlp = std::get_if<MlpArch>(&params.arch)) {
    out << "arch mlp " << mlp->hidden << ' ' << to_string(mlp->activation) << '\n';
  } else {
    out << "arch linear\n";
  }
  out << "input_dim " << params.input_dim << '\n';
  out << "num_classes " << params.num_classes << '\n';
  out << "layers " << params.layers.size() << '\n';
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const Layer& layer = params.layers[l];
    out << "layer " << l << " weight " << layer.weight.rows() << ' ' << layer.weight.cols()
        << '\n';
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        out << (c == 0 ? "" : " ") << format_double(layer.weight(r, c));
      }
      out << '\n';
    }
    out << "layer " << l << " bias " << layer.bias.size() << '\n';
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      out << (r == 0 ? "" : " ") << format_double(layer.bias(r));
    }
    out << '\n';
  }
  out << "end\n";
}

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot open checkpoint for writing: " + path);
  save_checkpoint(params, out);
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::vector<std::string> next() {
    std::string text;
    if (!std::getline(in_, text)) throw LoadError("unexpected end of checkpoint", line_ + 1);
    ++line_;
    std::istringstream ss(text);
    std::vector<std::string> tokens;
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    return tokens;
  }

  std::vector<std::string> expect(const std::string& key, std::size_t count) {
    auto tokens = next();
    if (tokens.empty() || tokens[0] != key || tokens.size() != count) {
      throw LoadError("expected '" + key + "' record", line_);
    }
    return tokens;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::size_t parse_count(const std::string& token, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw LoadError("expected a count, got '" + token + "'", line);
  }
  return v;
}

}  // namespace

ModelParams load_checkpoint(std::istream& in) {
  LineReader reader(in);
  auto header = reader.next();
  if (header.size() != 2 || header[0] != "adascale-checkpoint" || header[1] != "1") {
    throw LoadError("not an adascale checkpoint (version 1)", reader.line());
  }
  auto arch_tokens = reader.next();
  Architecture arch;
  if (arch_tokens.size() == 2 && arch_tokens[0] == "arch" && arch_tokens[1] == "linear") {
    arch = LinearArch{};
  } else if (arch_tokens.size() == 4 && arch_tokens[0] == "arch" && arch_tokens[1] == "mlp") {
    try {
      arch = MlpArch{parse_count(arch_tokens[2], reader.line()),
                     activation_from_string(arch_tokens[3])};
    } catch (const ArgumentError& e) {
      throw LoadError(e.what(), reader.line());
    }
  } else {
    throw LoadError("bad arch record", reader.line());
  }
  const std::size_t d = parse_count(reader.expect("input_dim", 2)[1], reader.line());
  const std::size_t k = parse_count(reader.expect("num_classes", 2)[1], reader.line());
  ModelParams params;
  try {
    params = ModelParams::zeros(arch, d, k);
  } catch (const ArgumentError& e) {
    throw LoadError(e.what(), reader.line());
  }
  const std::size_t n_layers = parse_count(reader.expect("layers", 2)[1], reader.line());
  if (n_layers != params.layers.size()) {
    throw LoadError("layer count does not match architecture", reader.line());
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    Layer& layer = params.layers[l];
    auto w = reader.expect("layer", 5);
    if (parse_count(w[1], reader.line()) != l || w[2] != "weight" ||
        parse_count(w[3], reader.line()) != static_cast<std::size_t>(layer.weight.rows()) ||
        parse_count(w[4], reader.line()) != static_cast<std::size_t>(layer.weight.cols())) {
      throw LoadError("weight header does not match architecture", reader.line());
    }
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      auto row = reader.next();
      if (row.size() != static_cast<std::size_t>(layer.weight.cols())) {
        throw LoadError("weight row has the wrong width", reader.line());
      }
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = parse_double(row[static_cast<std::size_t>(c)], reader.line());
      }
    }
    auto b = reader.expect("layer", 4);
    if (parse_count(b[1], reader.line()) != l || b[2] != "bias" ||
        parse_count(b[3], reader.line()) != static_cast<std::size_t>(layer.bias.size())) {
      throw LoadError("bias header does not match architecture", reader.line());
    }
    auto row = reader.next();
    if (row.size() != static_cast<std::size_t>(layer.bias.size())) {
      throw LoadError("bias row has the wrong width", reader.line());
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      layer.bias(r) = parse_double(row[static_cast<std::size_t>(r)], reader.line());
    }
  }
  reader.expect("end", 1);
  if (!params.all_finite()) throw LoadError("checkpoint contains non-finite weights");
  return params;
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open checkpoint: " + path);
  return load_checkpoint(in);
}

}  // namespace adascale
