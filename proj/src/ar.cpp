#include "arlstm/ar.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "arlstm/error.hpp"

namespace arlstm::ar {

ArModel fit_ols(const preprocess::SupervisedMatrix& data) {
    const std::size_t p = data.lag();
    const std::size_t n = data.rows();
    if (n < p + 2) {
        throw LengthError("AR(" + std::to_string(p) + ") fit needs at least " + std::to_string(p + 2) +
                          " rows, got " + std::to_string(n));
    }

    Eigen::MatrixXd design(n, p + 1);
    Eigen::VectorXd target(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto window = data.row(i);
        design(i, 0) = 1.0;
        for (std::size_t j = 1; j <= p; ++j) {
            design(i, j) = window[p - j];
        }
        target(i) = data.target(i);
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < static_cast<Eigen::Index>(p + 1)) {
        throw SingularError("AR design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                            " of " + std::to_string(p + 1) + ")");
    }
    const Eigen::VectorXd beta = qr.solve(target);

    ArModel model;
    model.intercept = beta(0);
    model.coefficients.assign(beta.data() + 1, beta.data() + 1 + p);
    if (!std::isfinite(model.intercept)) {
        throw SingularError("AR fit produced non-finite parameters");
    }
    for (double a : model.coefficients) {
        if (!std::isfinite(a)) {
            throw SingularError("AR fit produced non-finite parameters");
        }
    }
    return model;
}

double evaluate(double intercept, std::span<const double> coefficients, std::span<const double> window) {
    const std::size_t p = coefficients.size();
    if (window.size() != p) {
        throw DimensionError("AR(" + std::to_string(p) + ") needs a window of " + std::to_string(p) +
                             " values, got " + std::to_string(window.size()));
    }
    double y = intercept;
    for (std::size_t j = 1; j <= p; ++j) {
        y += coefficients[j - 1] * window[p - j];
    }
    return y;
}

double predict(const ArModel& model, std::span<const double> window) {
    return evaluate(model.intercept, model.coefficients, window);
}

std::vector<double> residuals(const ArModel& model, const preprocess::SupervisedMatrix& data) {
    if (data.lag() != model.lag()) {
        throw DimensionError("model lag " + std::to_string(model.lag()) + " does not match data lag " +
                             std::to_string(data.lag()));
    }
    std::vector<double> out(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        out[i] = data.target(i) - predict(model, data.row(i));
    }
    return out;
}

double bic(const ArModel& model, const preprocess::SupervisedMatrix& data) {
    const auto resid = residuals(model, data);
    double rss = 0.0;
    for (double r : resid) {
        rss += r * r;
    }
    if (rss == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double n = static_cast<double>(data.rows());
    const double k = static_cast<double>(model.lag() + 1);
    return n * std::log(rss / n) + k * std::log(n);
}

std::size_t select_lag_bic(std::span<const double> series, std::size_t max_lag) {
    if (max_lag == 0) {
        throw LengthError("max_lag must be positive");
    }
    if (series.size() <= max_lag) {
        throw LengthError("series too short for lag selection up to " + std::to_string(max_lag));
    }
    std::size_t best_lag = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        try {
            const auto data = preprocess::reshape_supervised(series.subspan(max_lag - lag), lag);
            const double score = bic(fit_ols(data), data);
            if (best_lag == 0 || score < best) {
                best = score;
                best_lag = lag;
            }
        } catch (const Error&) {
            continue;
        }
    }
    if (best_lag == 0) {
        throw SingularError("no candidate lag in 1.." + std::to_string(max_lag) + " could be fitted");
    }
    return best_lag;
}

}  // namespace arlstm::ar
