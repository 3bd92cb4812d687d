#pragma once

#include <span>
#include <string>
#include <vector>

#include "arlstm/eval.hpp"

namespace arlstm::plot {

struct Series {
    std::string label;
    std::vector<double> values;
    std::string colour;
};

/// Shaded interval drawn behind the lines.
struct Band {
    std::string label;
    std::vector<double> lower;
    std::vector<double> upper;
    std::string colour;
};

struct Chart {
    std::string title;
    std::string x_label = "day";
    std::string y_label;
    std::vector<Band> bands;
    std::vector<Series> lines;
};

/// Static SVG with axes, a legend, one <path class="band"> per band and one
/// <polyline class="line"> per series. Output depends only on the input.
[[nodiscard]] std::string render_svg(const Chart& chart);

/// Truth against every model's mean prediction for one trial. Neural models
/// get a band of two standard errors across seeds; AR has none since its
/// seeds agree.
[[nodiscard]] Chart trial_chart(std::span<const eval::TrialResult> results_for_trial);

/// Hybrid prediction, target and the two weighted contributions on the
/// normalized scale.
[[nodiscard]] Chart interpret_chart(const eval::Interpretation& interpretation, const std::string& title);

}  // namespace arlstm::plot
