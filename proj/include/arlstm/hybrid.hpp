#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arlstm/ar.hpp"
#include "arlstm/nn.hpp"
#include "arlstm/preprocess.hpp"

namespace arlstm::hybrid {

/// Additive AR + LSTM network:
///
///     y = alpha * (a0 + sum_j a_j Y_{t-j}) + (1 - alpha) * dense(lstm(window))
///
/// with alpha = logistic(alpha_logit). Both branches read the same window.
/// An infinite logit pins alpha to exactly 0 or 1.
struct HybridModel {
    double ar_intercept = 0.0;
    std::vector<double> ar_coefficients;  // [j-1] multiplies Y_{t-j}
    nn::LstmRegressor lstm;
    double alpha_logit = 0.0;

    [[nodiscard]] std::size_t lag() const noexcept { return ar_coefficients.size(); }
    [[nodiscard]] double alpha() const noexcept;
    [[nodiscard]] ar::ArModel ar_part() const { return {ar_intercept, ar_coefficients}; }

    [[nodiscard]] std::vector<nn::ParamRef> parameters();
    [[nodiscard]] HybridModel zeros_like() const;
};

[[nodiscard]] double logistic(double x) noexcept;

struct HybridParts {
    double alpha = 0.0;
    double ar_out = 0.0;
    double lstm_out = 0.0;
};

struct HybridOutput {
    double prediction = 0.0;
    HybridParts parts;
};

struct HybridCache {
    nn::RegressorCache lstm;
    std::vector<double> window;
    HybridParts parts;
};

[[nodiscard]] HybridOutput hybrid_forward(const HybridModel& model, std::span<const double> window,
                                          HybridCache& cache);
[[nodiscard]] HybridOutput hybrid_forward(const HybridModel& model, std::span<const double> window);

/// Accumulates gradients of every parameter, alpha_logit included, given
/// d(loss)/d(prediction). The LSTM branch receives d_output * (1 - alpha).
void hybrid_backward(const HybridModel& model, HybridCache& cache, double d_output, HybridModel& grad);

struct HybridOptions {
    /// Start the AR branch from these parameters instead of a random init.
    std::optional<ar::ArModel> warm_start_ar;
    /// Zero the LSTM head and keep every LSTM parameter fixed, so the model
    /// reduces to a scaled AR fit.
    bool freeze_lstm = false;
};

struct HybridFit {
    HybridModel model;
    std::vector<double> loss_history;
    std::vector<double> alpha_history;  // alpha at the end of each epoch
};

/// Joint Adam training of both branches and alpha with the same epoch and
/// batch regime as nn::train_lstm. For a given seed the LSTM branch starts
/// from the same weights as nn::train_lstm would.
[[nodiscard]] HybridFit train_hybrid(const preprocess::SupervisedMatrix& data, const nn::TrainConfig& config,
                                     const nn::AdamConfig& adam = {}, const HybridOptions& options = {});

[[nodiscard]] std::vector<double> predict(const HybridModel& model, const preprocess::SupervisedMatrix& data);

struct DecompositionRow {
    double prediction = 0.0;
    double alpha = 0.0;
    double ar_contribution = 0.0;    // alpha * ar_out
    double lstm_contribution = 0.0;  // (1 - alpha) * lstm_out
    double target = 0.0;
};

[[nodiscard]] std::vector<DecompositionRow> decompose(const HybridModel& model,
                                                      const preprocess::SupervisedMatrix& windows);

struct CoefficientRow {
    std::string model;
    double intercept = 0.0;
    std::vector<double> coefficients;
};

/// Pure AR coefficients next to the hybrid's AR-branch coefficients.
struct CoefficientTable {
    double alpha = 0.0;
    std::string scale_label = "scaled differenced training data";
    std::vector<CoefficientRow> rows;  // "AR" then "Hybrid"
};

[[nodiscard]] CoefficientTable coefficient_report(const HybridModel& model, const ar::ArModel& baseline);

/// Aligned text table with columns Models, intercept, Y_{t-1} .. Y_{t-p}.
[[nodiscard]] std::string to_text(const CoefficientTable& table);
[[nodiscard]] std::string to_csv(const CoefficientTable& table);

/// Index (1-based lag) of the largest-magnitude coefficient; ties go to the smaller lag.
[[nodiscard]] std::size_t dominant_lag(std::span<const double> coefficients);

struct HybridCheckDims {
    std::size_t lag = 3;
    std::size_t hidden_size = 1;
    std::size_t layers = 1;
};

/// Central-difference check over every hybrid parameter including
/// alpha_logit; returns the worst relative error.
[[nodiscard]] double gradient_check(const HybridCheckDims& dims, std::uint64_t seed, double step = 1e-5);

}  // namespace arlstm::hybrid
