#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "arlstm/preprocess.hpp"

namespace arlstm::ar {

/// Autoregressive model Y_t = a0 + sum_j a_j * Y_{t-j}.
///
/// coefficients[j-1] multiplies Y_{t-j}. Input windows are oldest-first, so
/// a_1 pairs with the last window entry.
struct ArModel {
    double intercept = 0.0;
    std::vector<double> coefficients;

    [[nodiscard]] std::size_t lag() const noexcept { return coefficients.size(); }
};

/// Least squares through a column-pivoted Householder QR of [1, Y_{t-1}, ..., Y_{t-p}].
/// Throws SingularError on a rank-deficient design.
[[nodiscard]] ArModel fit_ols(const preprocess::SupervisedMatrix& data);

[[nodiscard]] double predict(const ArModel& model, std::span<const double> window);

/// a0 + sum_j coefficients[j-1] * window[p-j]; shared by every AR evaluation
/// so that all of them round identically.
[[nodiscard]] double evaluate(double intercept, std::span<const double> coefficients,
                              std::span<const double> window);

[[nodiscard]] std::vector<double> residuals(const ArModel& model, const preprocess::SupervisedMatrix& data);

/// n*ln(RSS/n) + (p+1)*ln(n). Returns -infinity when RSS is exactly zero.
[[nodiscard]] double bic(const ArModel& model, const preprocess::SupervisedMatrix& data);

/// Lag in [1, max_lag] with the lowest BIC, every candidate scored on the same
/// targets series[max_lag..]. Ties go to the smaller lag; candidates whose
/// fit fails are skipped.
[[nodiscard]] std::size_t select_lag_bic(std::span<const double> series, std::size_t max_lag);

}  // namespace arlstm::ar
