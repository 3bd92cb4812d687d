#include <doctest.h>

#include <cmath>
#include <limits>

#include "arlstm/ar.hpp"
#include "arlstm/error.hpp"
#include "arlstm/eval.hpp"
#include "arlstm/hybrid.hpp"
#include "fixture.hpp"
#include "oracles.hpp"

using namespace arlstm;
using namespace arlstm::hybrid;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

HybridModel random_model(std::size_t lag, std::size_t hidden, std::uint64_t seed) {
    nn::Rng rng(seed);
    HybridModel m;
    m.lstm = nn::make_regressor(1, hidden, 1);
    m.ar_coefficients.resize(lag);
    for (auto& ref : m.parameters()) {
        for (double& x : ref.values) x = rng.uniform(-1.0, 1.0);
    }
    return m;
}

std::vector<double> window_of(std::size_t lag, std::uint64_t seed) {
    nn::Rng rng(seed);
    std::vector<double> w(lag);
    for (double& x : w) x = rng.uniform(-0.5, 0.5);
    return w;
}

/// Noiseless AR(2) oscillation around a positive level.
TimeSeries ar2_series(std::size_t n) {
    TimeSeries s;
    s.region = "synthetic";
    const double r = 0.995;
    const double a1 = 2.0 * r * std::cos(0.35);
    const double a2 = -r * r;
    const double level = 20.0;
    s.values = {level + 4.0, level + 1.0};
    while (s.values.size() < n) {
        const auto k = s.values.size();
        s.values.push_back(level * (1 - a1 - a2) + a1 * s.values[k - 1] + a2 * s.values[k - 2]);
    }
    auto day = std::chrono::sys_days{std::chrono::year{2020} / 1 / 1};
    for (std::size_t i = 0; i < n; ++i) s.dates.emplace_back(day + std::chrono::days{i});
    return s;
}

/// Noisy AR(2) around a positive level, so every lag column carries signal.
TimeSeries noisy_ar2_series(std::size_t n) {
    TimeSeries s;
    s.region = "noisy";
    for (double v : oracle::simulate_ar(0.0, {0.6, -0.3}, n, 1.0, 11)) s.values.push_back(100.0 + v);
    auto day = std::chrono::sys_days{std::chrono::year{2020} / 1 / 1};
    for (std::size_t i = 0; i < n; ++i) s.dates.emplace_back(day + std::chrono::days{i});
    return s;
}

}  // namespace

TEST_CASE("logistic and alpha") {
    CHECK(logistic(0.0) == 0.5);
    CHECK(logistic(kInf) == 1.0);
    CHECK(logistic(-kInf) == 0.0);
    CHECK(logistic(-800.0) > 0.0 - 1e-300);
    HybridModel m;
    m.alpha_logit = 2.0;
    CHECK(m.alpha() == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
}

TEST_CASE("forward: alpha 0.5 averages the branches") {
    HybridModel m;
    m.ar_intercept = 2.0;
    m.ar_coefficients = {0.0, 0.0};
    m.lstm = nn::make_regressor(1, 1, 1);  // zero weights: hidden is 0
    m.lstm.head.bias = 4.0;
    const auto out = hybrid_forward(m, std::vector<double>{0.3, -0.1});
    CHECK(out.parts.alpha == 0.5);
    CHECK(out.parts.ar_out == 2.0);
    CHECK(out.parts.lstm_out == 4.0);
    CHECK(out.prediction == 3.0);
    CHECK_THROWS_AS((void)hybrid_forward(m, std::vector<double>{0.3}), DimensionError);
}

TEST_CASE("pinned alpha reproduces each branch bit for bit") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        auto m = random_model(7, 1 + seed % 2, seed);
        const auto w = window_of(7, seed + 1000);
        nn::RegressorCache cache;
        const double lstm_alone = nn::regressor_forward(m.lstm, w, cache);
        const double ar_alone = ar::evaluate(m.ar_intercept, m.ar_coefficients, w);

        m.alpha_logit = kInf;
        CHECK(hybrid_forward(m, w).prediction == ar_alone);
        m.alpha_logit = -kInf;
        CHECK(hybrid_forward(m, w).prediction == lstm_alone);
    }
}

TEST_CASE("gradient check over every parameter including alpha_logit") {
    for (std::size_t lag : {3, 7}) {
        for (std::size_t h : {1, 2}) {
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                CHECK(gradient_check({lag, h, 1}, seed) < 1e-4);
            }
        }
    }
    CHECK(gradient_check({4, 1, 2}, 3) < 1e-4);
}

TEST_CASE("equal branch outputs give no alpha gradient") {
    HybridModel m;
    m.ar_intercept = 0.7;
    m.ar_coefficients = {0.0, 0.0, 0.0};
    m.lstm = nn::make_regressor(1, 1, 1);
    m.lstm.head.bias = 0.7;
    m.alpha_logit = 0.4;
    HybridCache cache;
    (void)hybrid_forward(m, std::vector<double>{0.1, 0.2, 0.3}, cache);
    auto grad = m.zeros_like();
    hybrid_backward(m, cache, 1.3, grad);
    CHECK(grad.alpha_logit == 0.0);
}

TEST_CASE("LSTM gradients carry the factor (1 - alpha)") {
    auto m = random_model(5, 2, 11);
    m.alpha_logit = 6.0;  // alpha close to 1
    const auto w = window_of(5, 12);
    HybridCache cache;
    (void)hybrid_forward(m, w, cache);
    auto grad = m.zeros_like();
    hybrid_backward(m, cache, 1.0, grad);

    nn::RegressorCache rc;
    (void)nn::regressor_forward(m.lstm, w, rc);
    auto alone = m.lstm.zeros_like();
    nn::regressor_backward(m.lstm, rc, 1.0, alone);

    const double factor = 1.0 - m.alpha();
    CHECK(factor < 0.01);
    const auto a = grad.lstm.parameters();
    const auto b = alone.parameters();
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < a[k].values.size(); ++i) {
            CHECK(a[k].values[i] == doctest::Approx(factor * b[k].values[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("decomposition adds up exactly") {
    const auto t = testing::prepared("San Diego", 300);
    auto m = random_model(7, 1, 5);
    for (const auto& row : decompose(m, t.test)) {
        CHECK(std::fabs(row.ar_contribution + row.lstm_contribution - row.prediction) <= 1e-12);
    }
    m.alpha_logit = kInf;
    for (const auto& row : decompose(m, t.test)) {
        CHECK(row.lstm_contribution == 0.0);
        CHECK(row.alpha == 1.0);
    }
}

TEST_CASE("coefficient report") {
    auto m = random_model(7, 1, 2);
    const ar::ArModel same{m.ar_intercept, m.ar_coefficients};
    const auto table = coefficient_report(m, same);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].model == "AR");
    CHECK(table.rows[1].model == "Hybrid");
    CHECK(table.rows[0].coefficients == table.rows[1].coefficients);
    CHECK(table.rows[0].intercept == table.rows[1].intercept);

    const auto text = to_text(table);
    CHECK(text.rfind("Models", 0) == 0);
    CHECK(text.find("intercept") != std::string::npos);
    CHECK(text.find("Y_{t-1}") < text.find("Y_{t-7}"));
    char alpha[32];
    std::snprintf(alpha, sizeof(alpha), "alpha = %.3f", m.alpha());
    CHECK(text.find(alpha) != std::string::npos);
    CHECK(to_csv(table).rfind("Models,intercept,Y_{t-1}", 0) == 0);

    CHECK_THROWS_AS((void)coefficient_report(m, ar::ArModel{0.0, {1.0, 2.0}}), DimensionError);
}

TEST_CASE("dominant_lag") {
    CHECK(dominant_lag(std::vector<double>{0.1, -0.9, 0.3}) == 2);
    CHECK(dominant_lag(std::vector<double>{0.5, -0.5}) == 1);
    CHECK_THROWS_AS((void)dominant_lag(std::vector<double>{}), DimensionError);
}

TEST_CASE("hybrid training is deterministic") {
    const auto t = testing::prepared("Sacramento", 210);
    nn::TrainConfig cfg;
    cfg.seed = 8;
    cfg.epochs = 1;
    const auto a = train_hybrid(t.train, cfg);
    const auto b = train_hybrid(t.train, cfg);
    CHECK(a.loss_history == b.loss_history);
    CHECK(a.alpha_history == b.alpha_history);
    CHECK(a.alpha_history.size() == 1);
}

TEST_CASE("frozen LSTM: the hybrid converges to the OLS fit on linear data") {
    const auto series = noisy_ar2_series(88);
    eval::TrialSpec spec;
    spec.region = series.region;
    const auto t = eval::prepare_trial(series.values, spec);
    const auto ols = ar::fit_ols(t.train);
    HybridOptions opts;
    opts.freeze_lstm = true;

    double previous_gap = kInf;
    for (std::size_t epochs : {25, 100, 400, 1600}) {
        nn::TrainConfig cfg;
        cfg.epochs = epochs;
        const auto fit = train_hybrid(t.train, cfg, {}, opts);
        double gap = 0;
        for (std::size_t r = 0; r < t.train.rows(); ++r) {
            const double d = hybrid_forward(fit.model, t.train.row(r)).prediction - ar::predict(ols, t.train.row(r));
            gap += d * d;
        }
        gap /= static_cast<double>(t.train.rows());
        CHECK(gap < previous_gap);
        previous_gap = gap;
    }
    CHECK(previous_gap < 1e-5);
}

// Seed sweeps recorded once and frozen here.
TEST_CASE("noiseless AR(2): the hybrid beats the LSTM in at least 90 of 100 seeds") {
    const auto series = ar2_series(100);
    eval::TrialSpec spec;
    spec.region = series.region;
    eval::RunOptions opts;
    opts.seeds = eval::default_seeds(100);
    const auto lstm = eval::run_trial(series, spec, eval::ModelKind::lstm, opts);
    const auto hyb = eval::run_trial(series, spec, eval::ModelKind::hybrid, opts);
    REQUIRE(lstm.per_seed_mape.size() == 100);
    REQUIRE(hyb.per_seed_mape.size() == 100);
    int wins = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        if (hyb.per_seed_mape[i] < lstm.per_seed_mape[i]) ++wins;
    }
    CHECK(wins >= 90);
    CHECK(wins == 100);  // recorded
}

TEST_CASE("hybrid loss ends no higher than it starts in at least 95 of 100 seeds") {
    const auto t = testing::prepared("Los Angeles", 0);
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        nn::TrainConfig cfg;
        cfg.seed = seed;
        const auto fit = train_hybrid(t.train, cfg);
        for (double l : fit.loss_history) REQUIRE(std::isfinite(l));
        for (double a : fit.alpha_history) {
            CHECK(a > 0.0);
            CHECK(a < 1.0);
        }
        if (fit.loss_history.back() <= fit.loss_history.front()) ++ok;
    }
    CHECK(ok >= 95);
    CHECK(ok == 100);  // recorded
}

TEST_CASE("warm start copies the OLS fit into the AR branch") {
    const auto t = testing::prepared("Orange", 28);
    const auto ols = ar::fit_ols(t.train);
    HybridOptions opts;
    opts.warm_start_ar = ols;
    nn::TrainConfig cfg;
    cfg.epochs = 1;
    const auto fit = train_hybrid(t.train, cfg, {}, opts);
    // One epoch of Adam moves each weight by at most rows * lr.
    for (std::size_t j = 0; j < 7; ++j) {
        CHECK(std::fabs(fit.model.ar_coefficients[j] - ols.coefficients[j]) <= t.train.rows() * 0.001 + 1e-12);
    }
    opts.warm_start_ar = ar::ArModel{0.0, {1.0}};
    CHECK_THROWS_AS((void)train_hybrid(t.train, cfg, {}, opts), DimensionError);
}
