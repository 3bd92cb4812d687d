#include "arlstm/serialize.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "arlstm/error.hpp"

namespace arlstm {

using nlohmann::json;

json real_to_json(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (std::isnan(value)) {
        return "nan";
    }
    return value;
}

double real_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw FormatError("expected a number, got \"" + s + "\"");
    }
    if (!j.is_number()) {
        throw FormatError("expected a number, got " + j.dump());
    }
    return j.get<double>();
}

namespace ar {

void to_json(json& j, const ArModel& model) {
    j = json{{"lag", model.lag()}, {"intercept", model.intercept}, {"coefficients", model.coefficients}};
}

void from_json(const json& j, ArModel& model) {
    model.intercept = j.at("intercept").get<double>();
    model.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (j.contains("lag") && j.at("lag").get<std::size_t>() != model.coefficients.size()) {
        throw FormatError("AR model: lag disagrees with the number of coefficients");
    }
}

}  // namespace ar

namespace nn {

void to_json(json& j, const LstmRegressor& model) {
    json layers = json::array();
    for (const auto& layer : model.layers) {
        layers.push_back({{"input_size", layer.input_size()},
                          {"hidden_size", layer.hidden_size()},
                          {"gate_order", {"input", "forget", "output", "candidate"}},
                          {"values", std::vector<double>(layer.values().begin(), layer.values().end())}});
    }
    j = json{{"layers", layers}, {"head", {{"weight", model.head.weight}, {"bias", model.head.bias}}}};
}

void from_json(const json& j, LstmRegressor& model) {
    model.layers.clear();
    for (const auto& layer : j.at("layers")) {
        LstmParams params(layer.at("input_size").get<std::size_t>(), layer.at("hidden_size").get<std::size_t>());
        const auto values = layer.at("values").get<std::vector<double>>();
        if (values.size() != params.values().size()) {
            throw FormatError("LSTM layer has " + std::to_string(values.size()) + " values, expected " +
                              std::to_string(params.values().size()));
        }
        std::copy(values.begin(), values.end(), params.values().begin());
        model.layers.push_back(std::move(params));
    }
    model.head.weight = j.at("head").at("weight").get<std::vector<double>>();
    model.head.bias = j.at("head").at("bias").get<double>();
    if (model.layers.empty() || model.head.weight.size() != model.layers.back().hidden_size()) {
        throw FormatError("LSTM head does not match the last layer");
    }
}

void to_json(json& j, const TrainConfig& config) {
    j = json{{"epochs", config.epochs},
             {"batch_size", config.batch_size},
             {"hidden_size", config.hidden_size},
             {"layers", config.layers}};
}

void to_json(json& j, const AdamConfig& config) {
    j = json{{"learning_rate", config.learning_rate},
             {"beta1", config.beta1},
             {"beta2", config.beta2},
             {"epsilon", config.epsilon}};
}

}  // namespace nn

namespace hybrid {

void to_json(json& j, const HybridModel& model) {
    j = json{{"lag", model.lag()},
             {"alpha_logit", real_to_json(model.alpha_logit)},
             {"alpha", model.alpha()},
             {"ar", model.ar_part()},
             {"lstm", model.lstm}};
}

void from_json(const json& j, HybridModel& model) {
    const auto ar_part = j.at("ar").get<ar::ArModel>();
    model.ar_intercept = ar_part.intercept;
    model.ar_coefficients = ar_part.coefficients;
    model.lstm = j.at("lstm").get<nn::LstmRegressor>();
    model.alpha_logit = real_from_json(j.at("alpha_logit"));
}

void to_json(json& j, const CoefficientTable& table) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        rows.push_back({{"model", row.model}, {"intercept", row.intercept}, {"coefficients", row.coefficients}});
    }
    j = json{{"alpha", table.alpha}, {"scale", table.scale_label}, {"rows", rows}};
}

void to_json(json& j, const DecompositionRow& row) {
    j = json{{"prediction", row.prediction},
             {"alpha", row.alpha},
             {"ar_contribution", row.ar_contribution},
             {"lstm_contribution", row.lstm_contribution},
             {"target", row.target}};
}

}  // namespace hybrid

namespace eval {

void to_json(json& j, const TrialSpec& spec) {
    j = json{{"region", spec.region},   {"start_index", spec.start_index}, {"trial_len", spec.trial_len},
             {"train_len", spec.train_len}, {"lag", spec.lag},               {"step", spec.step},
             {"test_rows", spec.test_rows()}};
}

void to_json(json& j, const TrialResult& result) {
    j = json{{"spec", result.spec},
             {"model_kind", std::string(to_string(result.model_kind))},
             {"start_date", result.start_date},
             {"seeds", result.seeds},
             {"per_seed_mape", result.per_seed_mape},
             {"mean_mape", result.mean_mape},
             {"sd_mape", result.sd_mape},
             {"invalid", result.invalid},
             {"truth", result.truth},
             {"predictions", result.predictions},
             {"mean_prediction", result.mean_prediction()},
             {"sd_prediction", result.sd_prediction()}};
    j["alpha"] = result.alpha ? json(*result.alpha) : json(nullptr);
    j["differenced_stationary"] =
        result.differenced_stationary ? json(*result.differenced_stationary) : json(nullptr);
    if (!result.hybrid.empty()) {
        json branches = json::array();
        for (const auto& h : result.hybrid) {
            branches.push_back(
                {{"alpha", h.alpha}, {"ar_intercept", h.ar_intercept}, {"ar_coefficients", h.ar_coefficients}});
        }
        j["hybrid"] = branches;
    }
    json failures = json::array();
    for (const auto& f : result.failures) {
        failures.push_back({{"seed", f.seed}, {"message", f.message}});
    }
    j["failures"] = failures;
}

void to_json(json& j, const AggregateTable& table) {
    json kinds = json::array();
    for (auto kind : table.kinds) kinds.push_back(std::string(to_string(kind)));
    json regions = json::object();
    for (const auto& [region, by_kind] : table.cells) {
        json row = json::object();
        for (const auto& [kind, cell] : by_kind) {
            row[std::string(to_string(kind))] = {{"mean_mape", cell.mean_mape},
                                                 {"sd_across_trials", cell.sd_across_trials},
                                                 {"mean_sd_across_seeds", cell.mean_sd_across_seeds},
                                                 {"trials", cell.trials},
                                                 {"invalid_trials", cell.invalid_trials}};
        }
        regions[region] = row;
    }
    json grand = json::object();
    for (const auto& [kind, mean] : table.grand_mean) grand[std::string(to_string(kind))] = mean;
    j = json{{"kinds", kinds}, {"regions", regions}, {"grand_mean", grand}};
}

}  // namespace eval

}  // namespace arlstm
