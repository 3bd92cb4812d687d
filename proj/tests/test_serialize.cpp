#include <doctest.h>

#include <limits>
#include <regex>

#include "arlstm/error.hpp"
#include "arlstm/plot.hpp"
#include "arlstm/serialize.hpp"
#include "fixture.hpp"

using namespace arlstm;
using nlohmann::json;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("AR model round-trips through JSON") {
    const ar::ArModel m{0.125, {0.1, -1.0 / 3.0, 2e-17}};
    const json j = m;
    CHECK(j.at("lag") == 3);
    const auto back = j.get<ar::ArModel>();
    CHECK(back.intercept == m.intercept);
    CHECK(back.coefficients == m.coefficients);
    json bad = j;
    bad["lag"] = 2;
    CHECK_THROWS_AS((void)bad.get<ar::ArModel>(), FormatError);
}

TEST_CASE("hybrid model round-trips and evaluates identically") {
    const auto t = testing::prepared("Orange", 77);
    nn::TrainConfig cfg;
    cfg.epochs = 3;
    cfg.layers = 2;
    cfg.hidden_size = 2;
    const auto model = hybrid::train_hybrid(t.train, cfg).model;
    const json j = model;
    CHECK(j.at("alpha") == model.alpha());
    CHECK(j.at("alpha_logit") == model.alpha_logit);
    const auto back = json::parse(j.dump()).get<hybrid::HybridModel>();
    CHECK(hybrid::predict(back, t.test) == hybrid::predict(model, t.test));
}

TEST_CASE("infinite alpha logits survive a round trip") {
    hybrid::HybridModel m;
    m.ar_coefficients = {0.5};
    m.lstm = nn::make_regressor(1, 1, 1);
    m.alpha_logit = std::numeric_limits<double>::infinity();
    const json j = m;
    CHECK(j.at("alpha_logit") == "inf");
    CHECK(json::parse(j.dump()).get<hybrid::HybridModel>().alpha() == 1.0);
    CHECK_THROWS_AS((void)real_from_json(json("seven")), FormatError);
}

TEST_CASE("LSTM shape mismatches are rejected") {
    json j = nn::make_regressor(1, 2, 1);
    j["layers"][0]["values"].erase(0);
    CHECK_THROWS_AS((void)j.get<nn::LstmRegressor>(), FormatError);
}

TEST_CASE("trial result JSON") {
    const auto& s = testing::fixture_smoothed().at("Orange");
    eval::RunOptions opts;
    opts.seeds = eval::default_seeds(3);
    opts.train.epochs = 5;
    const auto r = eval::run_trial(s, testing::fixture_trial("Orange", 0), eval::ModelKind::hybrid, opts);
    const json j = r;
    CHECK(j.at("model_kind") == "HYBRID");
    CHECK(j.at("per_seed_mape").size() == 3);
    CHECK(j.at("predictions").size() == 3);
    CHECK(j.at("predictions")[0].size() == 18);
    CHECK(j.at("alpha").is_number());
    CHECK(j.at("hybrid").size() == 3);
    CHECK(j.at("spec").at("test_rows") == 18);
}

TEST_CASE("SVG: one band per neural model, none for AR") {
    const auto& s = testing::fixture_smoothed().at("Alameda");
    eval::RunOptions opts;
    opts.seeds = eval::default_seeds(3);
    opts.train.epochs = 5;
    std::vector<eval::TrialResult> rs;
    for (auto kind : eval::kAllModels) rs.push_back(eval::run_trial(s, testing::fixture_trial("Alameda", 0), kind, opts));
    const auto svg = plot::render_svg(plot::trial_chart(rs));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(count(svg, "class=\"band\"") == 3);
    CHECK(count(svg, "class=\"band\" data-label=\"AR\"") == 0);
    CHECK(count(svg, "class=\"band\" data-label=\"Hybrid\"") == 1);
    CHECK(count(svg, "class=\"line\"") == 5);  // truth + four models
    CHECK(svg == plot::render_svg(plot::trial_chart(rs)));

    std::vector<eval::TrialResult> ar_only{rs.front()};
    CHECK(count(plot::render_svg(plot::trial_chart(ar_only)), "class=\"band\"") == 0);
}

TEST_CASE("SVG band half-width is two standard errors") {
    eval::TrialResult r;
    r.model_kind = eval::ModelKind::lstm;
    r.truth = {10, 11};
    r.seeds = {0, 1, 2, 3};
    r.predictions = {{9, 10}, {11, 12}, {9, 10}, {11, 12}};
    const auto chart = plot::trial_chart(std::vector<eval::TrialResult>{r});
    REQUIRE(chart.bands.size() == 1);
    // sd 1 over 4 seeds: standard error 0.5, band +-1.
    CHECK(chart.bands[0].lower == std::vector<double>{9, 10});
    CHECK(chart.bands[0].upper == std::vector<double>{11, 12});
}

TEST_CASE("interpret chart has truth, prediction and both contributions") {
    const auto& s = testing::fixture_smoothed().at("Los Angeles");
    eval::RunOptions opts;
    opts.train.epochs = 5;
    const auto r = eval::interpret_trial(s, testing::fixture_trial("Los Angeles", 0), 0, opts);
    const auto chart = plot::interpret_chart(r, "LA <test> & co");
    CHECK(chart.lines.size() == 4);
    CHECK(chart.bands.empty());
    const auto svg = plot::render_svg(chart);
    CHECK(svg.find("LA &lt;test&gt; &amp; co") != std::string::npos);
}
