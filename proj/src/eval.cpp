#include "arlstm/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "arlstm/error.hpp"

namespace arlstm::eval {

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::ar: return "AR";
        case ModelKind::lstm: return "LSTM";
        case ModelKind::lstm_double: return "LSTM_DOUBLE";
        case ModelKind::hybrid: return "HYBRID";
    }
    return "?";
}

std::string_view display_name(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::ar: return "AR";
        case ModelKind::lstm: return "LSTM";
        case ModelKind::lstm_double: return "LSTM (Double)";
        case ModelKind::hybrid: return "Hybrid";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (ModelKind kind : kAllModels) {
        if (upper == to_string(kind)) {
            return kind;
        }
    }
    return std::nullopt;
}

std::vector<std::uint64_t> default_seeds(std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
    return seeds;
}

void TrialSpec::validate(std::size_t series_len) const {
    auto fail = [&](const std::string& why) {
        throw DimensionError("invalid trial (len " + std::to_string(trial_len) + ", train " +
                             std::to_string(train_len) + ", lag " + std::to_string(lag) + "): " + why);
    };
    if (lag == 0) fail("lag must be positive");
    if (step == 0) fail("step must be positive");
    if (train_len >= trial_len) fail("no test data");
    if (test_len() <= lag) fail("test part has no complete row");
    if (train_diff_len() < lag + lag + 2) fail("training part too short to fit an AR model");
    if (start_index + trial_len > series_len) {
        fail("window [" + std::to_string(start_index) + ", " + std::to_string(start_index + trial_len) +
             ") exceeds series of length " + std::to_string(series_len));
    }
}

std::vector<TrialSpec> slice_trials(std::size_t series_len, const TrialSpec& shape) {
    std::vector<TrialSpec> trials;
    if (series_len < shape.trial_len) {
        std::clog << "warning: series of length " << series_len << " is shorter than one trial ("
                  << shape.trial_len << "); no trials\n";
        return trials;
    }
    for (std::size_t start = 0; start + shape.trial_len <= series_len; start += shape.step) {
        TrialSpec spec = shape;
        spec.start_index = start;
        spec.validate(series_len);
        trials.push_back(std::move(spec));
    }
    return trials;
}

TimeSeries smooth_series(const TimeSeries& raw, std::size_t tau) {
    TimeSeries out;
    out.region = raw.region;
    out.values = preprocess::smooth(raw.values, tau);
    if (!raw.dates.empty()) {
        out.dates.assign(raw.dates.begin() + static_cast<std::ptrdiff_t>(tau - 1), raw.dates.end());
    }
    return out;
}

PreparedTrial prepare_trial(std::span<const double> smoothed, const TrialSpec& spec) {
    spec.validate(smoothed.size());
    PreparedTrial t;
    const auto window = smoothed.subspan(spec.start_index, spec.trial_len);
    t.window.assign(window.begin(), window.end());
    t.differenced = preprocess::difference(t.window, 1);

    const std::span<const double> diffs(t.differenced);
    const auto train_raw = diffs.first(spec.train_diff_len());
    const auto test_raw = diffs.subspan(spec.train_diff_len());

    t.scaler = preprocess::fit_scaler(train_raw);
    t.train = preprocess::reshape_supervised(preprocess::scale(train_raw, t.scaler), spec.lag);
    t.test = preprocess::reshape_supervised(preprocess::scale(test_raw, t.scaler), spec.lag);

    // Test target r is differenced value train_diff_len + lag + r, i.e.
    // window[k + 1] - window[k] with k = train_diff_len + lag + r.
    const std::size_t first = spec.train_diff_len() + spec.lag;
    t.previous.resize(spec.test_rows());
    t.truth.resize(spec.test_rows());
    for (std::size_t r = 0; r < spec.test_rows(); ++r) {
        t.previous[r] = t.window[first + r];
        t.truth[r] = t.window[first + r + 1];
    }

    try {
        t.adf_differenced = preprocess::adf_test(t.differenced);
    } catch (const Error&) {
        t.adf_differenced.reset();
    }
    return t;
}

std::vector<double> reconstruct(std::span<const double> scaled_predictions, const PreparedTrial& trial) {
    if (scaled_predictions.size() != trial.previous.size()) {
        throw DimensionError("expected " + std::to_string(trial.previous.size()) + " predictions, got " +
                             std::to_string(scaled_predictions.size()));
    }
    auto out = preprocess::unscale(scaled_predictions, trial.scaler);
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] = preprocess::undifference(out[r], trial.previous[r]);
    }
    return out;
}

double mape(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.empty() || predicted.size() != truth.size()) {
        throw DimensionError("mape needs equal, non-empty sequences (got " + std::to_string(predicted.size()) +
                             " and " + std::to_string(truth.size()) + ")");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 0.0) {
            throw DegenerateError("mape: truth value at index " + std::to_string(i) + " is zero");
        }
        sum += std::abs(predicted[i] - truth[i]) / std::abs(truth[i]);
    }
    return 100.0 * sum / static_cast<double>(truth.size());
}

Moments moments(std::span<const double> values) {
    if (values.empty()) {
        return {};
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    std::vector<double> sq(sorted.size());
    std::transform(sorted.begin(), sorted.end(), sq.begin(), [&](double v) { return (v - mean) * (v - mean); });
    std::sort(sq.begin(), sq.end());
    return {mean, std::sqrt(std::accumulate(sq.begin(), sq.end(), 0.0) / n)};
}

std::vector<double> TrialResult::mean_prediction() const {
    std::vector<double> out(truth.size(), 0.0);
    std::vector<double> column(predictions.size());
    for (std::size_t d = 0; d < out.size(); ++d) {
        for (std::size_t s = 0; s < predictions.size(); ++s) column[s] = predictions[s][d];
        out[d] = moments(column).mean;
    }
    return out;
}

std::vector<double> TrialResult::sd_prediction() const {
    std::vector<double> out(truth.size(), 0.0);
    std::vector<double> column(predictions.size());
    for (std::size_t d = 0; d < out.size(); ++d) {
        for (std::size_t s = 0; s < predictions.size(); ++s) column[s] = predictions[s][d];
        out[d] = moments(column).sd;
    }
    return out;
}

namespace {

nn::TrainConfig seeded(const RunOptions& options, ModelKind kind, std::uint64_t seed) {
    nn::TrainConfig config = options.train;
    config.seed = seed;
    config.layers = kind == ModelKind::lstm_double ? 2 : 1;
    return config;
}

struct SeedOutcome {
    std::vector<double> scaled_predictions;
    std::optional<HybridSummary> hybrid;
};

SeedOutcome fit_and_predict(const PreparedTrial& t, ModelKind kind, std::uint64_t seed, const RunOptions& options) {
    SeedOutcome out;
    switch (kind) {
        case ModelKind::ar: {
            const auto model = ar::fit_ols(t.train);
            out.scaled_predictions.resize(t.test.rows());
            for (std::size_t r = 0; r < t.test.rows(); ++r) {
                out.scaled_predictions[r] = ar::predict(model, t.test.row(r));
            }
            break;
        }
        case ModelKind::lstm:
        case ModelKind::lstm_double: {
            const auto fit = nn::train_lstm(t.train, seeded(options, kind, seed), options.adam);
            out.scaled_predictions = nn::predict(fit.model, t.test);
            break;
        }
        case ModelKind::hybrid: {
            hybrid::HybridOptions hopts;
            if (options.warm_start_ar) {
                hopts.warm_start_ar = ar::fit_ols(t.train);
            }
            const auto fit = hybrid::train_hybrid(t.train, seeded(options, kind, seed), options.adam, hopts);
            out.scaled_predictions = hybrid::predict(fit.model, t.test);
            out.hybrid = HybridSummary{fit.model.alpha(), fit.model.ar_intercept, fit.model.ar_coefficients};
            break;
        }
    }
    return out;
}

}  // namespace

TrialResult run_trial(const TimeSeries& smoothed, const TrialSpec& spec, ModelKind kind, const RunOptions& options) {
    if (options.seeds.empty()) {
        throw DimensionError("at least one seed is required");
    }
    spec.validate(smoothed.size());

    TrialResult result;
    result.spec = spec;
    result.model_kind = kind;
    if (spec.start_index < smoothed.dates.size()) {
        result.start_date = format_date(smoothed.dates[spec.start_index]);
    }

    std::optional<PreparedTrial> trial;
    std::string prepare_error;
    try {
        trial = prepare_trial(smoothed.values, spec);
    } catch (const DegenerateError& e) {
        prepare_error = e.what();
    }

    if (trial) {
        result.truth = trial->truth;
        if (trial->adf_differenced) {
            result.differenced_stationary = trial->adf_differenced->stationary;
        }
        if (options.strict_stationarity && !result.differenced_stationary.value_or(false)) {
            throw StationarityError("region '" + spec.region + "' trial at " + result.start_date +
                                    ": differenced series is not judged stationary");
        }
    }

    auto record_failure = [&](std::uint64_t seed, const std::string& why) {
        result.failures.push_back({seed, why});
    };

    if (!trial) {
        for (auto seed : options.seeds) record_failure(seed, prepare_error);
    } else if (kind == ModelKind::ar) {
        try {
            const auto outcome = fit_and_predict(*trial, kind, 0, options);
            const auto predicted = reconstruct(outcome.scaled_predictions, *trial);
            const double score = mape(predicted, trial->truth);
            for (auto seed : options.seeds) {
                result.seeds.push_back(seed);
                result.per_seed_mape.push_back(score);
                result.predictions.push_back(predicted);
            }
        } catch (const Error& e) {
            for (auto seed : options.seeds) record_failure(seed, e.what());
        }
    } else {
        for (auto seed : options.seeds) {
            try {
                const auto outcome = fit_and_predict(*trial, kind, seed, options);
                const auto predicted = reconstruct(outcome.scaled_predictions, *trial);
                const double score = mape(predicted, trial->truth);
                result.seeds.push_back(seed);
                result.per_seed_mape.push_back(score);
                result.predictions.push_back(predicted);
                if (outcome.hybrid) result.hybrid.push_back(*outcome.hybrid);
            } catch (const Error& e) {
                record_failure(seed, e.what());
            }
        }
    }

    const auto m = moments(result.per_seed_mape);
    result.mean_mape = m.mean;
    result.sd_mape = m.sd;
    if (!result.hybrid.empty()) {
        std::vector<double> alphas;
        for (const auto& h : result.hybrid) alphas.push_back(h.alpha);
        result.alpha = moments(alphas).mean;
    }
    result.invalid = result.seeds.empty() ||
                     static_cast<double>(result.failures.size()) > 0.2 * static_cast<double>(options.seeds.size());
    return result;
}

std::vector<TrialResult> run_trials(const std::map<std::string, TimeSeries>& smoothed, std::span<const TrialSpec> trials,
                                    std::span<const ModelKind> kinds, const RunOptions& options, std::size_t threads) {
    const std::size_t jobs = trials.size() * kinds.size();
    std::vector<std::optional<TrialResult>> slots(jobs);
    std::vector<std::string> errors(jobs);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t j = next++; j < jobs; j = next++) {
            const auto& spec = trials[j / kinds.size()];
            try {
                const auto it = smoothed.find(spec.region);
                if (it == smoothed.end()) {
                    throw DimensionError("unknown region '" + spec.region + "'");
                }
                slots[j] = run_trial(it->second, spec, kinds[j % kinds.size()], options);
            } catch (const Error& e) {
                // The sweep carries on; the trial is reported with every seed failed.
                TrialResult failed;
                failed.spec = spec;
                failed.model_kind = kinds[j % kinds.size()];
                for (auto seed : options.seeds) failed.failures.push_back({seed, e.what()});
                failed.invalid = true;
                slots[j] = std::move(failed);
            } catch (const std::exception& e) {
                errors[j] = e.what();
            }
        }
    };

    if (threads == 0) {
        threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, std::max<std::size_t>(jobs, 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    std::vector<TrialResult> results;
    results.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) {
        if (!slots[j]) {
            throw Error(errors[j]);
        }
        results.push_back(std::move(*slots[j]));
    }
    return results;
}

AggregateTable aggregate(std::span<const TrialResult> results) {
    AggregateTable table;
    std::map<std::string, std::map<ModelKind, std::vector<const TrialResult*>>> grouped;
    for (const auto& r : results) {
        grouped[r.spec.region][r.model_kind].push_back(&r);
    }
    for (ModelKind kind : kAllModels) {
        for (const auto& [region, by_kind] : grouped) {
            if (by_kind.contains(kind)) {
                table.kinds.push_back(kind);
                break;
            }
        }
    }

    std::map<ModelKind, std::vector<double>> region_means;
    for (const auto& [region, by_kind] : grouped) {
        for (const auto& [kind, trials] : by_kind) {
            AggregateCell cell;
            std::vector<double> means;
            std::vector<double> sds;
            for (const auto* r : trials) {
                if (r->seeds.empty()) {
                    ++cell.invalid_trials;
                    continue;
                }
                if (r->invalid) ++cell.invalid_trials;
                means.push_back(r->mean_mape);
                sds.push_back(r->sd_mape);
            }
            const auto m = moments(means);
            cell.mean_mape = m.mean;
            cell.sd_across_trials = m.sd;
            cell.mean_sd_across_seeds = moments(sds).mean;
            cell.trials = means.size();
            table.cells[region][kind] = cell;
            if (cell.trials > 0) region_means[kind].push_back(cell.mean_mape);
        }
    }
    for (const auto& [kind, means] : region_means) {
        table.grand_mean[kind] = moments(means).mean;
    }
    return table;
}

namespace {

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string AggregateTable::to_csv() const {
    std::ostringstream out;
    out << "# mean MAPE (%) over trials; sd columns are population standard deviations\n";
    out << "region";
    for (ModelKind kind : kinds) {
        const auto name = std::string(display_name(kind));
        out << ',' << name << ',' << name << " sd_trials," << name << " sd_seeds," << name << " trials";
    }
    out << '\n';
    for (const auto& [region, by_kind] : cells) {
        out << region;
        for (ModelKind kind : kinds) {
            const auto it = by_kind.find(kind);
            if (it == by_kind.end()) {
                out << ",,,,";
                continue;
            }
            const auto& c = it->second;
            out << ',' << fixed(c.mean_mape, 3) << ',' << fixed(c.sd_across_trials, 3) << ','
                << fixed(c.mean_sd_across_seeds, 3) << ',' << c.trials;
        }
        out << '\n';
    }
    out << "grand mean";
    for (ModelKind kind : kinds) {
        const auto it = grand_mean.find(kind);
        out << ',' << (it == grand_mean.end() ? std::string() : fixed(it->second, 3)) << ",,,";
    }
    out << '\n';
    return out.str();
}

std::string AggregateTable::summary_line() const {
    std::ostringstream out;
    out << "grand mean MAPE:";
    bool first = true;
    for (ModelKind kind : kinds) {
        const auto it = grand_mean.find(kind);
        if (it == grand_mean.end()) continue;
        out << (first ? " " : ", ") << display_name(kind) << ' ' << fixed(it->second, 3) << '%';
        first = false;
    }
    return out.str();
}

std::string trace_csv(std::span<const TrialResult> results_for_trial) {
    if (results_for_trial.empty()) {
        return {};
    }
    const auto& first = results_for_trial.front();
    std::ostringstream out;
    out << "region,trial_start_date,day,truth";
    std::vector<std::pair<std::vector<double>, std::vector<double>>> stats;
    for (const auto& r : results_for_trial) {
        out << ',' << to_string(r.model_kind) << "_mean_prediction," << to_string(r.model_kind) << "_sd_prediction";
        stats.emplace_back(r.mean_prediction(), r.sd_prediction());
    }
    out << '\n';
    for (std::size_t d = 0; d < first.truth.size(); ++d) {
        out << first.spec.region << ',' << first.start_date << ',' << (d + 1) << ',' << format_real(first.truth[d]);
        for (const auto& [mean, sd] : stats) {
            if (d < mean.size() && !mean.empty()) {
                out << ',' << format_real(mean[d]) << ',' << format_real(sd[d]);
            } else {
                out << ",,";
            }
        }
        out << '\n';
    }
    return out.str();
}

Interpretation interpret_trial(const TimeSeries& smoothed, const TrialSpec& spec, std::uint64_t seed,
                               const RunOptions& options) {
    Interpretation out;
    out.trial = prepare_trial(smoothed.values, spec);
    out.ar_model = ar::fit_ols(out.trial.train);

    hybrid::HybridOptions hopts;
    if (options.warm_start_ar) {
        hopts.warm_start_ar = out.ar_model;
    }
    out.hybrid_model =
        hybrid::train_hybrid(out.trial.train, seeded(options, ModelKind::hybrid, seed), options.adam, hopts).model;
    out.coefficients = hybrid::coefficient_report(out.hybrid_model, out.ar_model);
    out.decomposition = hybrid::decompose(out.hybrid_model, out.trial.test);

    std::vector<double> ar_scaled(out.trial.test.rows());
    std::vector<double> hybrid_scaled(out.trial.test.rows());
    for (std::size_t r = 0; r < out.trial.test.rows(); ++r) {
        ar_scaled[r] = ar::predict(out.ar_model, out.trial.test.row(r));
        hybrid_scaled[r] = out.decomposition[r].prediction;
    }
    out.ar_mape = mape(reconstruct(ar_scaled, out.trial), out.trial.truth);
    out.hybrid_mape = mape(reconstruct(hybrid_scaled, out.trial), out.trial.truth);
    return out;
}

}  // namespace arlstm::eval
