#include "arlstm/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "arlstm/error.hpp"
#include "arlstm/ingest.hpp"
#include "training.hpp"

namespace arlstm::hybrid {

double logistic(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

double HybridModel::alpha() const noexcept { return logistic(alpha_logit); }

std::vector<nn::ParamRef> HybridModel::parameters() {
    auto refs = lstm.parameters();
    refs.push_back({"ar.intercept", std::span<double>(&ar_intercept, 1)});
    refs.push_back({"ar.coefficients", ar_coefficients});
    refs.push_back({"alpha_logit", std::span<double>(&alpha_logit, 1)});
    return refs;
}

HybridModel HybridModel::zeros_like() const {
    HybridModel out;
    out.ar_coefficients.assign(ar_coefficients.size(), 0.0);
    out.lstm = lstm.zeros_like();
    return out;
}

HybridOutput hybrid_forward(const HybridModel& model, std::span<const double> window, HybridCache& cache) {
    if (window.size() != model.lag()) {
        throw DimensionError("hybrid model of lag " + std::to_string(model.lag()) + " got a window of " +
                             std::to_string(window.size()));
    }
    cache.window.assign(window.begin(), window.end());
    HybridParts& parts = cache.parts;
    parts.alpha = model.alpha();
    parts.ar_out = ar::evaluate(model.ar_intercept, model.ar_coefficients, window);
    parts.lstm_out = nn::regressor_forward(model.lstm, window, cache.lstm);
    return {parts.alpha * parts.ar_out + (1.0 - parts.alpha) * parts.lstm_out, parts};
}

HybridOutput hybrid_forward(const HybridModel& model, std::span<const double> window) {
    HybridCache cache;
    return hybrid_forward(model, window, cache);
}

namespace {

void backward_impl(const HybridModel& model, HybridCache& cache, double d_output, HybridModel& grad,
                   bool include_lstm) {
    const std::size_t p = model.lag();
    if (cache.window.size() != p || grad.ar_coefficients.size() != p) {
        throw DimensionError("hybrid cache or gradient buffer does not match the model lag");
    }
    const auto& parts = cache.parts;
    const double alpha = parts.alpha;

    const double d_alpha = d_output * (parts.ar_out - parts.lstm_out);
    grad.alpha_logit += d_alpha * alpha * (1.0 - alpha);

    const double d_ar = d_output * alpha;
    grad.ar_intercept += d_ar;
    for (std::size_t j = 1; j <= p; ++j) {
        grad.ar_coefficients[j - 1] += d_ar * cache.window[p - j];
    }

    if (include_lstm) {
        nn::regressor_backward(model.lstm, cache.lstm, d_output * (1.0 - alpha), grad.lstm);
    }
}

}  // namespace

void hybrid_backward(const HybridModel& model, HybridCache& cache, double d_output, HybridModel& grad) {
    backward_impl(model, cache, d_output, grad, true);
}

HybridFit train_hybrid(const preprocess::SupervisedMatrix& data, const nn::TrainConfig& config,
                       const nn::AdamConfig& adam, const HybridOptions& options) {
    config.validate(data.rows());
    const std::size_t p = data.lag();

    nn::Rng rng(config.seed);
    HybridFit fit;
    HybridModel& model = fit.model;
    model.lstm = nn::init_regressor(config, rng);
    const double bound = 0.5 / std::sqrt(static_cast<double>(p));
    model.ar_coefficients.resize(p);
    for (double& a : model.ar_coefficients) a = rng.uniform(-bound, bound);
    model.ar_intercept = 0.0;
    model.alpha_logit = 0.0;

    if (options.warm_start_ar) {
        if (options.warm_start_ar->lag() != p) {
            throw DimensionError("warm-start AR model has lag " + std::to_string(options.warm_start_ar->lag()) +
                                 ", data has lag " + std::to_string(p));
        }
        model.ar_intercept = options.warm_start_ar->intercept;
        model.ar_coefficients = options.warm_start_ar->coefficients;
    }
    if (options.freeze_lstm) {
        std::fill(model.lstm.head.weight.begin(), model.lstm.head.weight.end(), 0.0);
        model.lstm.head.bias = 0.0;
    }

    auto grad = model.zeros_like();
    HybridCache cache;
    const bool include_lstm = !options.freeze_lstm;
    fit.loss_history = nn::detail::fit_sequential(
        model, grad, data, config, adam,
        [&](std::span<const double> window, double target, double scale) {
            const double err = hybrid_forward(model, window, cache).prediction - target;
            backward_impl(model, cache, 2.0 * err * scale, grad, include_lstm);
            return err * err;
        },
        [&](std::size_t) { fit.alpha_history.push_back(model.alpha()); });
    return fit;
}

std::vector<double> predict(const HybridModel& model, const preprocess::SupervisedMatrix& data) {
    HybridCache cache;
    std::vector<double> out(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        out[i] = hybrid_forward(model, data.row(i), cache).prediction;
    }
    return out;
}

std::vector<DecompositionRow> decompose(const HybridModel& model, const preprocess::SupervisedMatrix& windows) {
    HybridCache cache;
    std::vector<DecompositionRow> rows(windows.rows());
    for (std::size_t i = 0; i < windows.rows(); ++i) {
        const auto out = hybrid_forward(model, windows.row(i), cache);
        auto& row = rows[i];
        row.prediction = out.prediction;
        row.alpha = out.parts.alpha;
        row.ar_contribution = out.parts.alpha * out.parts.ar_out;
        row.lstm_contribution = (1.0 - out.parts.alpha) * out.parts.lstm_out;
        row.target = windows.target(i);
    }
    return rows;
}

CoefficientTable coefficient_report(const HybridModel& model, const ar::ArModel& baseline) {
    if (baseline.lag() != model.lag()) {
        throw DimensionError("AR baseline has lag " + std::to_string(baseline.lag()) + ", hybrid has lag " +
                             std::to_string(model.lag()));
    }
    CoefficientTable table;
    table.alpha = model.alpha();
    table.rows.push_back({"AR", baseline.intercept, baseline.coefficients});
    table.rows.push_back({"Hybrid", model.ar_intercept, model.ar_coefficients});
    return table;
}

namespace {

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::vector<std::string> header_cells(std::size_t lag) {
    std::vector<std::string> cells{"Models", "intercept"};
    for (std::size_t j = 1; j <= lag; ++j) {
        cells.push_back("Y_{t-" + std::to_string(j) + "}");
    }
    return cells;
}

}  // namespace

std::string to_text(const CoefficientTable& table) {
    const std::size_t lag = table.rows.empty() ? 0 : table.rows.front().coefficients.size();
    std::vector<std::vector<std::string>> cells{header_cells(lag)};
    for (const auto& row : table.rows) {
        std::vector<std::string> line{row.model, fixed3(row.intercept)};
        for (double c : row.coefficients) line.push_back(fixed3(c));
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }

    std::ostringstream out;
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c > 0) out << "  ";
            if (c == 0) {
                out << line[c] << std::string(width[c] - line[c].size(), ' ');
            } else {
                out << std::string(width[c] - line[c].size(), ' ') << line[c];
            }
        }
        out << '\n';
    }
    out << "alpha = " << fixed3(table.alpha) << "  (coefficients on " << table.scale_label << ")\n";
    return out.str();
}

std::string to_csv(const CoefficientTable& table) {
    const std::size_t lag = table.rows.empty() ? 0 : table.rows.front().coefficients.size();
    std::ostringstream out;
    const auto header = header_cells(lag);
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << ",alpha\n";
    for (const auto& row : table.rows) {
        out << row.model << ',' << format_real(row.intercept);
        for (double c : row.coefficients) out << ',' << format_real(c);
        out << ',' << format_real(table.alpha) << '\n';
    }
    return out.str();
}

std::size_t dominant_lag(std::span<const double> coefficients) {
    if (coefficients.empty()) {
        throw DimensionError("no coefficients");
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < coefficients.size(); ++j) {
        if (std::abs(coefficients[j]) > std::abs(coefficients[best])) best = j;
    }
    return best + 1;
}

double gradient_check(const HybridCheckDims& dims, std::uint64_t seed, double step) {
    nn::Rng rng(seed);
    HybridModel model;
    model.lstm = nn::make_regressor(1, dims.hidden_size, dims.layers);
    model.ar_coefficients.resize(dims.lag);
    for (auto& ref : model.parameters()) {
        for (double& x : ref.values) x = rng.uniform(-1.0, 1.0);
    }
    std::vector<double> window(dims.lag);
    for (double& x : window) x = rng.uniform(-1.0, 1.0);
    const double target = rng.uniform(-1.0, 1.0);

    HybridCache cache;
    auto loss = [&]() {
        const double e = hybrid_forward(model, window, cache).prediction - target;
        return e * e;
    };

    auto grad = model.zeros_like();
    const double y = hybrid_forward(model, window, cache).prediction;
    hybrid_backward(model, cache, 2.0 * (y - target), grad);

    auto params = model.parameters();
    const auto grads = grad.parameters();
    double worst = 0.0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        for (std::size_t i = 0; i < params[b].values.size(); ++i) {
            double& x = params[b].values[i];
            const double saved = x;
            x = saved + step;
            const double up = loss();
            x = saved - step;
            const double down = loss();
            x = saved;
            worst = std::max(worst, nn::relative_error(grads[b].values[i], (up - down) / (2.0 * step)));
        }
    }
    return worst;
}

}  // namespace arlstm::hybrid
