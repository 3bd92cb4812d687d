#pragma once

#include <json.hpp>

#include "arlstm/ar.hpp"
#include "arlstm/eval.hpp"
#include "arlstm/hybrid.hpp"
#include "arlstm/nn.hpp"

// JSON forms of the models and results. Doubles are written with the
// shortest round-trip representation, so a model read back evaluates
// bit-identically. Non-finite values (an alpha logit pinned at +/-inf) are
// stored as the strings "inf" and "-inf".

namespace arlstm::ar {
void to_json(nlohmann::json& j, const ArModel& model);
void from_json(const nlohmann::json& j, ArModel& model);
}  // namespace arlstm::ar

namespace arlstm::nn {
void to_json(nlohmann::json& j, const LstmRegressor& model);
void from_json(const nlohmann::json& j, LstmRegressor& model);
void to_json(nlohmann::json& j, const TrainConfig& config);
void to_json(nlohmann::json& j, const AdamConfig& config);
}  // namespace arlstm::nn

namespace arlstm::hybrid {
void to_json(nlohmann::json& j, const HybridModel& model);
void from_json(const nlohmann::json& j, HybridModel& model);
void to_json(nlohmann::json& j, const CoefficientTable& table);
void to_json(nlohmann::json& j, const DecompositionRow& row);
}  // namespace arlstm::hybrid

namespace arlstm::eval {
void to_json(nlohmann::json& j, const TrialSpec& spec);
void to_json(nlohmann::json& j, const TrialResult& result);
void to_json(nlohmann::json& j, const AggregateTable& table);
}  // namespace arlstm::eval

namespace arlstm {

[[nodiscard]] nlohmann::json real_to_json(double value);
[[nodiscard]] double real_from_json(const nlohmann::json& j);

}  // namespace arlstm
