#pragma once

// JSON encodings for configs and run reports. Parsers reject unknown keys
// so a typo in an experiment file fails loudly instead of silently
// falling back to a default.

#include <nlohmann/json.hpp>

#include "adascale/data.hpp"
#include "adascale/losses.hpp"
#include "adascale/model.hpp"
#include "adascale/trainer.hpp"

namespace adascale {

using Json = nlohmann::json;

Json to_json(const LossStrategy& s);
LossStrategy strategy_from_json(const Json& j);

Json to_json(const SamplerKind& s);
SamplerKind sampler_from_json(const Json& j);

Json to_json(const OptimizerConfig& o);
OptimizerConfig optimizer_from_json(const Json& j);

Json to_json(const Architecture& a);
Architecture architecture_from_json(const Json& j);

Json to_json(const GeneratorConfig& g);
/// Fields absent from `j` keep their values from `base`.
GeneratorConfig generator_from_json(const Json& j, GeneratorConfig base = {});

/// `seed` is not part of the encoding; runs get their seed from the harness.
Json to_json(const TrainConfig& c);
/// Fields absent from `j` keep their values from `base`.
TrainConfig train_config_from_json(const Json& j, TrainConfig base = {});

Json to_json(const EvalResult& r);
EvalResult eval_result_from_json(const Json& j);

/// Everything except wall-clock time, which would break byte-identical
/// reruns.
Json to_json(const RunReport& r);
RunReport run_report_from_json(const Json& j);

/// Throws ArgumentError naming the first key of `j` not in `allowed`.
void require_known_keys(const Json& j, std::initializer_list<const char*> allowed,
                        const char* context);

}  // namespace adascale
