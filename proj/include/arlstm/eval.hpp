#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arlstm/ar.hpp"
#include "arlstm/hybrid.hpp"
#include "arlstm/ingest.hpp"
#include "arlstm/nn.hpp"
#include "arlstm/preprocess.hpp"

namespace arlstm::eval {

enum class ModelKind { ar, lstm, lstm_double, hybrid };

/// Column order of every results table.
inline constexpr std::array<ModelKind, 4> kAllModels{ModelKind::ar, ModelKind::lstm, ModelKind::lstm_double,
                                                     ModelKind::hybrid};

[[nodiscard]] std::string_view to_string(ModelKind kind) noexcept;
/// Table heading: "AR", "LSTM", "LSTM (Double)", "Hybrid".
[[nodiscard]] std::string_view display_name(ModelKind kind) noexcept;
/// Accepts AR, LSTM, LSTM_DOUBLE, HYBRID in any case.
[[nodiscard]] std::optional<ModelKind> parse_model_kind(std::string_view text);
[[nodiscard]] constexpr bool is_neural(ModelKind kind) noexcept { return kind != ModelKind::ar; }

/// One window of the smoothed series, trained and tested on its own.
///
/// The window's trial_len values are differenced once; the first
/// train_len - 1 differences train the model and the remaining
/// trial_len - train_len are reshaped into test rows.
struct TrialSpec {
    std::string region;
    std::size_t start_index = 0;
    std::size_t trial_len = 88;
    std::size_t train_len = 63;
    std::size_t lag = 7;
    std::size_t step = 7;

    [[nodiscard]] std::size_t differenced_len() const noexcept { return trial_len - 1; }
    [[nodiscard]] std::size_t train_diff_len() const noexcept { return train_len - 1; }
    [[nodiscard]] std::size_t test_len() const noexcept { return trial_len - train_len; }
    [[nodiscard]] std::size_t train_rows() const noexcept { return train_diff_len() - lag; }
    [[nodiscard]] std::size_t test_rows() const noexcept { return test_len() - lag; }

    /// Throws DimensionError unless the window splits into a fittable train
    /// set and at least one test row, and fits inside `series_len` values.
    void validate(std::size_t series_len) const;
};

/// Start indices 0, step, 2*step, ... while the window fits. Too short a
/// series yields no trials and a warning on std::clog.
[[nodiscard]] std::vector<TrialSpec> slice_trials(std::size_t series_len, const TrialSpec& shape);

/// Trailing moving average of a whole region; the first tau - 1 dates are dropped.
[[nodiscard]] TimeSeries smooth_series(const TimeSeries& raw, std::size_t tau);

/// Every intermediate product of the preprocessing chain for one trial.
struct PreparedTrial {
    std::vector<double> window;       // trial_len smoothed values
    std::vector<double> differenced;  // trial_len - 1
    preprocess::ScalerParams scaler;
    preprocess::SupervisedMatrix train;  // scaled
    preprocess::SupervisedMatrix test;   // scaled
    std::vector<double> previous;  // true smoothed value preceding each test target
    std::vector<double> truth;     // smoothed value at each test target
    std::optional<preprocess::AdfReport> adf_differenced;
};

[[nodiscard]] PreparedTrial prepare_trial(std::span<const double> smoothed, const TrialSpec& spec);

/// Unscales model outputs and adds back the true previous observation.
[[nodiscard]] std::vector<double> reconstruct(std::span<const double> scaled_predictions, const PreparedTrial& trial);

/// Mean absolute percentage error in percent. Throws DegenerateError naming
/// the index of a zero truth value.
[[nodiscard]] double mape(std::span<const double> predicted, std::span<const double> truth);

/// 0, 1, ..., count - 1.
[[nodiscard]] std::vector<std::uint64_t> default_seeds(std::size_t count);

struct RunOptions {
    std::vector<std::uint64_t> seeds = default_seeds(100);
    nn::TrainConfig train;  // seed and layers are set per run
    nn::AdamConfig adam;
    bool warm_start_ar = false;
    bool strict_stationarity = false;
};

/// The AR-branch readout of one fitted hybrid.
struct HybridSummary {
    double alpha = 0.0;
    double ar_intercept = 0.0;
    std::vector<double> ar_coefficients;
};

struct SeedFailure {
    std::uint64_t seed = 0;
    std::string message;
};

struct TrialResult {
    TrialSpec spec;
    ModelKind model_kind = ModelKind::ar;
    std::string start_date;
    std::vector<double> truth;

    std::vector<std::uint64_t> seeds;         // successful seeds
    std::vector<double> per_seed_mape;        // parallel to seeds
    std::vector<std::vector<double>> predictions;
    std::vector<HybridSummary> hybrid;        // parallel to seeds, hybrid only
    std::vector<SeedFailure> failures;

    double mean_mape = 0.0;
    double sd_mape = 0.0;  // population sd across seeds
    std::optional<double> alpha;  // mean fitted alpha, hybrid only
    std::optional<bool> differenced_stationary;
    bool invalid = false;  // more than 20% of seeds failed

    [[nodiscard]] std::vector<double> mean_prediction() const;
    [[nodiscard]] std::vector<double> sd_prediction() const;
};

/// Runs the full chain for one model kind: difference, split, scale on train
/// statistics, reshape, fit, predict the test rows, reconstruct against the
/// true previous value and score. AR is fitted once and its outcome repeated
/// for every seed.
[[nodiscard]] TrialResult run_trial(const TimeSeries& smoothed, const TrialSpec& spec, ModelKind kind,
                                    const RunOptions& options);

/// Runs every (trial, kind) pair, using up to `threads` workers. Results are
/// ordered by trial index, then by position in `kinds`. A trial that raises a
/// library error comes back with every seed listed under `failures`.
[[nodiscard]] std::vector<TrialResult> run_trials(const std::map<std::string, TimeSeries>& smoothed,
                                                  std::span<const TrialSpec> trials,
                                                  std::span<const ModelKind> kinds, const RunOptions& options,
                                                  std::size_t threads = 0);

/// Mean and population standard deviation; the values are summed in sorted
/// order so the result does not depend on their arrangement.
struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};
[[nodiscard]] Moments moments(std::span<const double> values);

struct AggregateCell {
    double mean_mape = 0.0;          // mean over trials of trial mean MAPE
    double sd_across_trials = 0.0;   // population sd of trial means
    double mean_sd_across_seeds = 0.0;
    std::size_t trials = 0;
    std::size_t invalid_trials = 0;
};

struct AggregateTable {
    std::vector<ModelKind> kinds;  // in kAllModels order
    std::map<std::string, std::map<ModelKind, AggregateCell>> cells;
    std::map<ModelKind, double> grand_mean;  // mean over regions

    [[nodiscard]] std::string to_csv() const;
    /// e.g. "grand mean MAPE: AR 5.629%, LSTM 5.070%, ..."
    [[nodiscard]] std::string summary_line() const;
};

[[nodiscard]] AggregateTable aggregate(std::span<const TrialResult> results);

/// Per-day prediction traces of one trial across models.
[[nodiscard]] std::string trace_csv(std::span<const TrialResult> results_for_trial);

/// Pure AR and hybrid fits of one trial, for interpretability reports.
struct Interpretation {
    PreparedTrial trial;
    ar::ArModel ar_model;
    hybrid::HybridModel hybrid_model;
    hybrid::CoefficientTable coefficients;
    std::vector<hybrid::DecompositionRow> decomposition;  // test rows, scaled space
    double ar_mape = 0.0;
    double hybrid_mape = 0.0;
};

[[nodiscard]] Interpretation interpret_trial(const TimeSeries& smoothed, const TrialSpec& spec, std::uint64_t seed,
                                             const RunOptions& options);

}  // namespace arlstm::eval
