#include "arlstm/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "arlstm/error.hpp"

namespace arlstm::preprocess {

SupervisedMatrix::SupervisedMatrix(std::size_t lag, std::vector<double> inputs,
                                   std::vector<double> targets)
    : lag_(lag), inputs_(std::move(inputs)), targets_(std::move(targets)) {
    if (lag_ == 0) {
        throw DimensionError("lag must be positive");
    }
    if (inputs_.size() != targets_.size() * lag_) {
        throw DimensionError("supervised matrix has " + std::to_string(inputs_.size()) +
                             " inputs for " + std::to_string(targets_.size()) +
                             " targets at lag " + std::to_string(lag_));
    }
}

std::vector<double> smooth(std::span<const double> series, std::size_t tau) {
    if (tau == 0) {
        throw LengthError("smoothing window must be positive");
    }
    if (series.size() < tau) {
        throw LengthError("smoothing needs at least " + std::to_string(tau) + " values, got " +
                          std::to_string(series.size()));
    }
    std::vector<double> out(series.size() - tau + 1);
    for (std::size_t j = 0; j < out.size(); ++j) {
        // Summed afresh per window so that constant input gives constant output exactly.
        const double sum = std::accumulate(series.begin() + j, series.begin() + j + tau, 0.0);
        out[j] = sum / static_cast<double>(tau);
    }
    return out;
}

std::vector<double> difference(std::span<const double> series, std::size_t order) {
    if (order == 0) {
        throw LengthError("differencing order must be positive");
    }
    if (series.size() <= order) {
        throw LengthError("differencing of order " + std::to_string(order) + " needs more than " +
                          std::to_string(order) + " values, got " + std::to_string(series.size()));
    }
    std::vector<double> out(series.begin(), series.end());
    for (std::size_t k = 0; k < order; ++k) {
        for (std::size_t t = 0; t + 1 < out.size(); ++t) {
            out[t] = out[t + 1] - out[t];
        }
        out.pop_back();
    }
    return out;
}

ScalerParams fit_scaler(std::span<const double> train) {
    if (train.size() < 2) {
        throw LengthError("scaler needs at least 2 training values");
    }
    const auto [lo, hi] = std::minmax_element(train.begin(), train.end());
    if (!(*hi > *lo)) {
        throw DegenerateError("training data has zero range; cannot rescale");
    }
    const double mean = std::accumulate(train.begin(), train.end(), 0.0) / static_cast<double>(train.size());
    return {mean, *lo, *hi};
}

std::vector<double> scale(std::span<const double> values, const ScalerParams& params) {
    std::vector<double> out(values.size());
    const double range = params.range();
    std::transform(values.begin(), values.end(), out.begin(),
                   [&](double v) { return (v - params.mean) / range; });
    return out;
}

std::vector<double> unscale(std::span<const double> values, const ScalerParams& params) {
    std::vector<double> out(values.size());
    const double range = params.range();
    std::transform(values.begin(), values.end(), out.begin(),
                   [&](double v) { return v * range + params.mean; });
    return out;
}

SupervisedMatrix reshape_supervised(std::span<const double> series, std::size_t lag) {
    if (lag == 0) {
        throw LengthError("lag must be positive");
    }
    if (series.size() <= lag) {
        throw LengthError("reshaping at lag " + std::to_string(lag) + " needs more than " +
                          std::to_string(lag) + " values, got " + std::to_string(series.size()));
    }
    const std::size_t rows = series.size() - lag;
    std::vector<double> inputs;
    inputs.reserve(rows * lag);
    std::vector<double> targets(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        inputs.insert(inputs.end(), series.begin() + i, series.begin() + i + lag);
        targets[i] = series[i + lag];
    }
    return SupervisedMatrix(lag, std::move(inputs), std::move(targets));
}

AdfReport adf_test(std::span<const double> series) {
    if (series.size() < kAdfMinLength) {
        throw LengthError("ADF test needs at least " + std::to_string(kAdfMinLength) + " values");
    }
    // Regress dy_t on [1, y_{t-1}] in closed form (two-column OLS).
    const std::size_t n = series.size() - 1;
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        mean_x += series[t];
        mean_y += series[t + 1] - series[t];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double dx = series[t] - mean_x;
        sxx += dx * dx;
        sxy += dx * ((series[t + 1] - series[t]) - mean_y);
    }
    if (!(sxx > 0.0)) {
        throw DegenerateError("ADF regression is singular: series is constant");
    }
    const double gamma = sxy / sxx;
    const double intercept = mean_y - gamma * mean_x;

    double rss = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double resid = (series[t + 1] - series[t]) - intercept - gamma * series[t];
        rss += resid * resid;
    }
    const double sigma2 = rss / static_cast<double>(n - 2);
    const double se = std::sqrt(sigma2 / sxx);
    if (!(se > 0.0)) {
        throw DegenerateError("ADF regression has zero residual variance");
    }

    AdfReport report;
    report.statistic = gamma / se;
    report.critical_values = kAdfCriticalValues;
    report.stationary = report.statistic < report.critical_values[1];
    return report;
}

}  // namespace arlstm::preprocess
