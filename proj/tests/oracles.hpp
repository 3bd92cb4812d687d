#pragma once

// Independent reference computations used by the tests. None of these call
// into the library.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Solves A x = b by Gaussian elimination with partial pivoting in long double.
inline std::vector<double> solve(std::vector<std::vector<long double>> a, std::vector<long double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        if (a[pivot][col] == 0.0L) throw std::runtime_error("singular");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const long double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        long double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * static_cast<long double>(x[c]);
        x[i] = static_cast<double>(s / a[i][i]);
    }
    return x;
}

/// OLS of y_t on [1, y_{t-1}, ..., y_{t-p}] through the normal equations.
/// Returns {intercept, a_1, ..., a_p}.
inline std::vector<double> ar_normal_equations(const std::vector<double>& y, std::size_t p) {
    const std::size_t k = p + 1;
    std::vector<std::vector<long double>> xtx(k, std::vector<long double>(k, 0.0L));
    std::vector<long double> xty(k, 0.0L);
    for (std::size_t t = p; t < y.size(); ++t) {
        std::vector<long double> row(k);
        row[0] = 1.0L;
        for (std::size_t j = 1; j <= p; ++j) row[j] = y[t - j];
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += row[a] * y[t];
            for (std::size_t b = 0; b < k; ++b) xtx[a][b] += row[a] * row[b];
        }
    }
    return solve(xtx, xty);
}

/// Residual sum of squares of an AR fit over targets y[first..].
inline double ar_rss(const std::vector<double>& y, const std::vector<double>& fit, std::size_t first) {
    const std::size_t p = fit.size() - 1;
    long double rss = 0.0L;
    for (std::size_t t = first; t < y.size(); ++t) {
        long double pred = fit[0];
        for (std::size_t j = 1; j <= p; ++j) pred += fit[j] * static_cast<long double>(y[t - j]);
        rss += (y[t] - pred) * (y[t] - pred);
    }
    return static_cast<double>(rss);
}

/// y_t = c + sum_j a[j-1] y_{t-j} + sigma * e_t after a burn-in.
inline std::vector<double> simulate_ar(double c, const std::vector<double>& a, std::size_t n, double sigma,
                                       std::uint32_t seed, std::size_t burn_in = 200) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> y(a.size(), 0.0);
    for (std::size_t t = a.size(); t < n + burn_in + a.size(); ++t) {
        double v = c + sigma * noise(gen);
        for (std::size_t j = 1; j <= a.size(); ++j) v += a[j - 1] * y[t - j];
        y.push_back(v);
    }
    return {y.end() - static_cast<std::ptrdiff_t>(n), y.end()};
}

/// Single-unit LSTM on a scalar sequence, written out gate by gate.
struct ScalarLstm {
    // input, forget, output, candidate
    double w[4];
    double u[4];
    double b[4];

    double run(const std::vector<double>& xs) const {
        auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
        double h = 0.0;
        double c = 0.0;
        for (double x : xs) {
            const double i = sig(w[0] * x + u[0] * h + b[0]);
            const double f = sig(w[1] * x + u[1] * h + b[1]);
            const double o = sig(w[2] * x + u[2] * h + b[2]);
            const double g = std::tanh(w[3] * x + u[3] * h + b[3]);
            c = f * c + i * g;
            h = o * std::tanh(c);
        }
        return h;
    }
};

inline double relative(double a, double b) {
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

}  // namespace oracle
