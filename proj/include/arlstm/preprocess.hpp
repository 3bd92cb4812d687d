#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace arlstm::preprocess {

/// Train-set statistics behind the affine rescaling.
struct ScalerParams {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;  // > min

    [[nodiscard]] double range() const noexcept { return max - min; }
};

/// Lagged input windows and their one-step targets.
///
/// Windows are stored oldest-first: row i holds series[i .. i+lag-1] and its
/// target is series[i+lag].
class SupervisedMatrix {
public:
    SupervisedMatrix() = default;
    SupervisedMatrix(std::size_t lag, std::vector<double> inputs, std::vector<double> targets);

    [[nodiscard]] std::size_t lag() const noexcept { return lag_; }
    [[nodiscard]] std::size_t rows() const noexcept { return targets_.size(); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {inputs_.data() + i * lag_, lag_};
    }
    [[nodiscard]] double target(std::size_t i) const { return targets_[i]; }
    [[nodiscard]] std::span<const double> targets() const noexcept { return targets_; }
    [[nodiscard]] std::span<const double> inputs() const noexcept { return inputs_; }

private:
    std::size_t lag_ = 0;
    std::vector<double> inputs_;  // rows x lag, row-major
    std::vector<double> targets_;
};

/// Trailing moving average: out[j] = mean(series[j .. j+tau-1]).
[[nodiscard]] std::vector<double> smooth(std::span<const double> series, std::size_t tau);

/// Recursive forward differences; the output is `order` values shorter.
[[nodiscard]] std::vector<double> difference(std::span<const double> series, std::size_t order = 1);

/// Inverts a first difference against the known previous observation.
[[nodiscard]] constexpr double undifference(double predicted_diff, double previous_observation) noexcept {
    return predicted_diff + previous_observation;
}

/// Throws DegenerateError when the training range is empty.
[[nodiscard]] ScalerParams fit_scaler(std::span<const double> train);
[[nodiscard]] std::vector<double> scale(std::span<const double> values, const ScalerParams& params);
[[nodiscard]] std::vector<double> unscale(std::span<const double> values, const ScalerParams& params);

[[nodiscard]] SupervisedMatrix reshape_supervised(std::span<const double> series, std::size_t lag);

/// Dickey-Fuller test without augmentation lags: dy_t = c + gamma*y_{t-1} + e_t.
struct AdfReport {
    double statistic = 0.0;
    std::array<double, 3> critical_values{};  // 1%, 5%, 10%
    bool stationary = false;                  // statistic < 5% critical value
};

/// Asymptotic MacKinnon critical values, constant but no trend.
inline constexpr std::array<double, 3> kAdfCriticalValues{-3.43, -2.86, -2.57};
inline constexpr std::size_t kAdfMinLength = 20;

[[nodiscard]] AdfReport adf_test(std::span<const double> series);

}  // namespace arlstm::preprocess
