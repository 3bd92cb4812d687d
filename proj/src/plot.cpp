#include "arlstm/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace arlstm::plot {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 180.0;  // legend column
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 4> kPalette{"#d62728", "#1f77b4", "#9467bd", "#2ca02c"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    [[nodiscard]] double x(std::size_t i) const {
        return kLeft + (kWidth - kLeft - kRight) * static_cast<double>(i) / std::max(x_max, 1.0);
    }
    [[nodiscard]] double y(double v) const {
        return kTop + (kHeight - kTop - kBottom) * (y_max - v) / (y_max - y_min);
    }
};

Frame frame_for(const Chart& chart) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t n = 0;
    auto take = [&](const std::vector<double>& values) {
        for (double v : values) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        n = std::max(n, values.size());
    };
    for (const auto& b : chart.bands) {
        take(b.lower);
        take(b.upper);
    }
    for (const auto& l : chart.lines) take(l.values);

    Frame f;
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    f.y_min = lo - pad;
    f.y_max = hi + pad;
    f.x_max = n > 1 ? static_cast<double>(n - 1) : 1.0;
    return f;
}

}  // namespace

std::string render_svg(const Chart& chart) {
    const Frame f = frame_for(chart);
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(kLeft) << "\" y=\"24\" font-size=\"15\">" << escape(chart.title) << "</text>\n";

    // Axes and y ticks.
    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom;
    out << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y0)
        << "\"/>\n";
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y0)
        << "\"/>\n";
    out << "</g>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = f.y_min + (f.y_max - f.y_min) * k / 4.0;
        out << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(f.y(v) + 4) << "\" text-anchor=\"end\">" << tick(v)
            << "</text>\n";
    }
    const auto n = static_cast<std::size_t>(f.x_max) + 1;
    for (std::size_t i = 0; i < n; i += std::max<std::size_t>(1, n / 6)) {
        out << "<text x=\"" << num(f.x(i)) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">" << (i + 1)
            << "</text>\n";
    }
    out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
        << escape(chart.x_label) << "</text>\n";
    out << "<text transform=\"translate(16," << num((kTop + y0) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(chart.y_label) << "</text>\n";

    for (const auto& band : chart.bands) {
        std::ostringstream d;
        for (std::size_t i = 0; i < band.upper.size(); ++i) {
            d << (i == 0 ? 'M' : 'L') << num(f.x(i)) << ',' << num(f.y(band.upper[i])) << ' ';
        }
        for (std::size_t i = band.lower.size(); i-- > 0;) {
            d << 'L' << num(f.x(i)) << ',' << num(f.y(band.lower[i])) << ' ';
        }
        out << "<path class=\"band\" data-label=\"" << escape(band.label) << "\" d=\"" << d.str()
            << "Z\" fill=\"" << band.colour << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    for (const auto& line : chart.lines) {
        out << "<polyline class=\"line\" data-label=\"" << escape(line.label) << "\" fill=\"none\" stroke=\""
            << line.colour << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < line.values.size(); ++i) {
            out << (i == 0 ? "" : " ") << num(f.x(i)) << ',' << num(f.y(line.values[i]));
        }
        out << "\"/>\n";
    }

    double ly = kTop + 10;
    for (const auto& line : chart.lines) {
        out << "<line x1=\"" << num(x1 + 15) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(x1 + 40) << "\" y2=\""
            << num(ly) << "\" stroke=\"" << line.colour << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << num(x1 + 46) << "\" y=\"" << num(ly + 4) << "\">" << escape(line.label)
            << "</text>\n";
        ly += 20;
    }
    out << "</svg>\n";
    return out.str();
}

Chart trial_chart(std::span<const eval::TrialResult> results_for_trial) {
    Chart chart;
    chart.y_label = "smoothed cases";
    if (results_for_trial.empty()) {
        return chart;
    }
    const auto& first = results_for_trial.front();
    chart.title = first.spec.region + " from " + first.start_date;
    chart.lines.push_back({"Truth", first.truth, "#000000"});

    for (const auto& r : results_for_trial) {
        if (r.seeds.empty()) continue;
        const auto pos = static_cast<std::size_t>(
            std::find(eval::kAllModels.begin(), eval::kAllModels.end(), r.model_kind) - eval::kAllModels.begin());
        const std::string colour = kPalette[pos % kPalette.size()];
        const std::string label(eval::display_name(r.model_kind));
        const auto mean = r.mean_prediction();
        if (eval::is_neural(r.model_kind)) {
            const auto sd = r.sd_prediction();
            const double root_n = std::sqrt(static_cast<double>(r.seeds.size()));
            Band band{label, mean, mean, colour};
            for (std::size_t d = 0; d < mean.size(); ++d) {
                const double half = 2.0 * sd[d] / root_n;
                band.lower[d] -= half;
                band.upper[d] += half;
            }
            chart.bands.push_back(std::move(band));
        }
        chart.lines.push_back({label, mean, colour});
    }
    return chart;
}

Chart interpret_chart(const eval::Interpretation& interpretation, const std::string& title) {
    Chart chart;
    chart.title = title;
    chart.y_label = "normalized differenced value";
    Series target{"Truth", {}, "#000000"};
    Series prediction{"Hybrid", {}, kPalette[3]};
    Series ar_part{"AR part", {}, kPalette[0]};
    Series lstm_part{"LSTM part", {}, kPalette[1]};
    for (const auto& row : interpretation.decomposition) {
        target.values.push_back(row.target);
        prediction.values.push_back(row.prediction);
        ar_part.values.push_back(row.ar_contribution);
        lstm_part.values.push_back(row.lstm_contribution);
    }
    chart.lines = {target, prediction, ar_part, lstm_part};
    return chart;
}

}  // namespace arlstm::plot
