#include "adascale/serialization.hpp"

#include <string>

#include "adascale/errors.hpp"

namespace adascale {

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::string type_of(const Json& j, const char* context) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ArgumentError(std::string(context) + " must be an object with a string 'type'");
  }
  return j["type"].get<std::string>();
}

}  // namespace

void require_known_keys(const Json& j, std::initializer_list<const char*> allowed,
                        const char* context) {
  if (!j.is_object()) throw ArgumentError(std::string(context) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ArgumentError(std::string("unknown key '") + key + "' in " + context);
  }
}

Json to_json(const LossStrategy& s) {
  if (std::holds_alternative<strategy::Vanilla>(s)) return {{"type", "vanilla"}};
  if (const auto* a = std::get_if<strategy::Adaptive>(&s)) {
    return {{"type", "adaptive"}, {"beta", a->beta.value()}};
  }
  if (const auto* st = std::get_if<strategy::Static>(&s)) {
    return {{"type", "static"}, {"negative_cost", st->negative_cost}};
  }
  return {{"type", "focal"}, {"gamma", std::get<strategy::Focal>(s).gamma}};
}

LossStrategy strategy_from_json(const Json& j) {
  const std::string type = type_of(j, "strategy");
  LossStrategy s;
  if (type == "vanilla") {
    require_known_keys(j, {"type"}, "strategy");
    s = strategy::Vanilla{};
  } else if (type == "adaptive") {
    require_known_keys(j, {"type", "beta"}, "strategy");
    s = strategy::Adaptive{Beta(get_or(j, "beta", 1.0))};
  } else if (type == "static") {
    require_known_keys(j, {"type", "negative_cost"}, "strategy");
    s = strategy::Static{get_or(j, "negative_cost", 1.0)};
  } else if (type == "focal") {
    require_known_keys(j, {"type", "gamma"}, "strategy");
    s = strategy::Focal{get_or(j, "gamma", 2.0)};
  } else {
    throw ArgumentError("unknown strategy type '" + type + "'");
  }
  validate(s);
  return s;
}

Json to_json(const SamplerKind& s) {
  if (const auto* st = std::get_if<sampler::Stratified>(&s)) {
    return {{"type", "stratified"}, {"min_positives_per_batch", st->min_positives_per_batch}};
  }
  if (const auto* us = std::get_if<sampler::UnderSample>(&s)) {
    return {{"type", "undersample"}, {"neg_to_pos_ratio", us->neg_to_pos_ratio}};
  }
  return {{"type", "uniform"}};
}

SamplerKind sampler_from_json(const Json& j) {
  const std::string type = type_of(j, "sampler");
  SamplerKind s;
  if (type == "uniform") {
    require_known_keys(j, {"type"}, "sampler");
    s = sampler::Uniform{};
  } else if (type == "stratified") {
    require_known_keys(j, {"type", "min_positives_per_batch"}, "sampler");
    s = sampler::Stratified{get_or<std::size_t>(j, "min_positives_per_batch", 1)};
  } else if (type == "undersample") {
    require_known_keys(j, {"type", "neg_to_pos_ratio"}, "sampler");
    s = sampler::UnderSample{get_or(j, "neg_to_pos_ratio", 1.0)};
  } else {
    throw ArgumentError("unknown sampler type '" + type + "'");
  }
  validate(s);
  return s;
}

Json to_json(const OptimizerConfig& o) {
  if (const auto* sgd = std::get_if<optim::Sgd>(&o)) {
    return {{"type", "sgd"}, {"lr", sgd->lr}, {"momentum", sgd->momentum}};
  }
  const auto& adam = std::get<optim::Adam>(o);
  return {{"type", "adam"}, {"lr", adam.lr}, {"b1", adam.b1}, {"b2", adam.b2}, {"eps", adam.eps}};
}

OptimizerConfig optimizer_from_json(const Json& j) {
  const std::string type = type_of(j, "optimizer");
  if (type == "sgd") {
    require_known_keys(j, {"type", "lr", "momentum"}, "optimizer");
    optim::Sgd sgd;
    return optim::Sgd{get_or(j, "lr", sgd.lr), get_or(j, "momentum", sgd.momentum)};
  }
  if (type == "adam") {
    require_known_keys(j, {"type", "lr", "b1", "b2", "eps"}, "optimizer");
    optim::Adam a;
    return optim::Adam{get_or(j, "lr", a.lr), get_or(j, "b1", a.b1), get_or(j, "b2", a.b2),
                       get_or(j, "eps", a.eps)};
  }
  throw ArgumentError("unknown optimizer type '" + type + "'");
}

Json to_json(const Architecture& a) {
  if (const auto* mlp = std::get_if<MlpArch>(&a)) {
    return {{"arch", "mlp"}, {"hidden", mlp->hidden}, {"activation", to_string(mlp->activation)}};
  }
  return {{"arch", "linear"}};
}

Architecture architecture_from_json(const Json& j) {
  require_known_keys(j, {"arch", "hidden", "activation"}, "model");
  const auto arch = get_or<std::string>(j, "arch", "linear");
  if (arch == "linear") return LinearArch{};
  if (arch == "mlp") {
    MlpArch mlp;
    mlp.hidden = get_or(j, "hidden", mlp.hidden);
    mlp.activation = activation_from_string(get_or<std::string>(j, "activation", "tanh"));
    if (mlp.hidden == 0) throw ArgumentError("mlp hidden size must be positive");
    return mlp;
  }
  throw ArgumentError("unknown architecture '" + arch + "'");
}

Json to_json(const GeneratorConfig& g) {
  return {{"n", g.n},
          {"d", g.d},
          {"k", g.k},
          {"positive_rate", g.positive_rate},
          {"negative_modes", g.negative_modes},
          {"class_separation", g.class_separation},
          {"noise_scale", g.noise_scale},
          {"seed", g.seed}};
}

GeneratorConfig generator_from_json(const Json& j, GeneratorConfig base) {
  require_known_keys(j,
                     {"n", "d", "k", "positive_rate", "negative_modes", "class_separation",
                      "noise_scale", "seed", "n_dev", "n_test"},
                     "generator");
  base.n = get_or(j, "n", base.n);
  base.d = get_or(j, "d", base.d);
  base.k = get_or(j, "k", base.k);
  base.positive_rate = get_or(j, "positive_rate", base.positive_rate);
  base.negative_modes = get_or(j, "negative_modes", base.negative_modes);
  base.class_separation = get_or(j, "class_separation", base.class_separation);
  base.noise_scale = get_or(j, "noise_scale", base.noise_scale);
  base.seed = get_or(j, "seed", base.seed);
  base.validate();
  return base;
}

Json to_json(const TrainConfig& c) {
  Json j = {{"optimizer", to_json(c.optimizer)},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"sampler", to_json(c.sampler)},
            {"strategy", to_json(c.strategy)},
            {"eval_beta", c.eval_beta.value()}};
  j["early_stop_patience"] = c.early_stop_patience ? Json(*c.early_stop_patience) : Json(nullptr);
  return j;
}

TrainConfig train_config_from_json(const Json& j, TrainConfig base) {
  require_known_keys(j,
                     {"optimizer", "epochs", "batch_size", "sampler", "strategy", "eval_beta",
                      "early_stop_patience"},
                     "train config");
  if (j.contains("optimizer")) base.optimizer = optimizer_from_json(j["optimizer"]);
  base.epochs = get_or(j, "epochs", base.epochs);
  base.batch_size = get_or(j, "batch_size", base.batch_size);
  if (j.contains("sampler")) base.sampler = sampler_from_json(j["sampler"]);
  if (j.contains("strategy")) base.strategy = strategy_from_json(j["strategy"]);
  if (j.contains("eval_beta")) base.eval_beta = Beta(get_or(j, "eval_beta", 1.0));
  if (j.contains("early_stop_patience")) {
    const auto& p = j["early_stop_patience"];
    base.early_stop_patience =
        p.is_null() ? std::nullopt : std::optional<std::size_t>(p.get<std::size_t>());
  }
  base.validate();
  return base;
}

Json to_json(const EvalResult& r) {
  return {{"precision", r.precision},
          {"recall", r.recall},
          {"f_beta", r.f_beta},
          {"confusion",
           {{"p", r.stats.p}, {"n", r.stats.n}, {"tp", r.stats.tp}, {"tn", r.stats.tn},
            {"pe", r.stats.pe}}}};
}

EvalResult eval_result_from_json(const Json& j) {
  EvalResult r;
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.f_beta = j.at("f_beta").get<double>();
  const auto& c = j.at("confusion");
  r.stats = {c.at("p").get<double>(), c.at("n").get<double>(), c.at("tp").get<double>(),
             c.at("tn").get<double>(), c.at("pe").get<double>()};
  return r;
}

Json to_json(const RunReport& r) {
  Json epochs = Json::array();
  for (std::size_t e = 0; e < r.epochs.size(); ++e) {
    epochs.push_back(
        {{"epoch", e}, {"train_loss", r.epochs[e].train_loss}, {"dev", to_json(r.epochs[e].dev)}});
  }
  return {{"seed", r.seed},
          {"valid", r.valid},
          {"diagnostic", r.diagnostic},
          {"epochs", epochs},
          {"best_epoch", r.best_epoch},
          {"best_dev_f", r.best_dev_f},
          {"test", to_json(r.test)},
          {"steps", r.steps},
          {"skipped_steps", r.skipped_steps},
          {"w_trace", r.w_trace},
          {"warnings", r.warnings}};
}

RunReport run_report_from_json(const Json& j) {
  RunReport r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.valid = j.at("valid").get<bool>();
  r.diagnostic = j.at("diagnostic").get<std::string>();
  for (const auto& e : j.at("epochs")) {
    r.epochs.push_back({e.at("train_loss").get<double>(), eval_result_from_json(e.at("dev"))});
  }
  r.best_epoch = j.at("best_epoch").get<std::size_t>();
  r.best_dev_f = j.at("best_dev_f").get<double>();
  r.test = eval_result_from_json(j.at("test"));
  r.steps = j.at("steps").get<std::size_t>();
  r.skipped_steps = j.at("skipped_steps").get<std::size_t>();
  r.w_trace = j.at("w_trace").get<std::vector<double>>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

}  // namespace adascale
