#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "arlstm/error.hpp"
#include "arlstm/eval.hpp"
#include "arlstm/ingest.hpp"
#include "arlstm/plot.hpp"
#include "arlstm/serialize.hpp"

namespace arlstm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<std::uint64_t> RunConfig::seed_list() const {
    std::vector<std::uint64_t> list(seeds);
    for (std::size_t i = 0; i < seeds; ++i) list[i] = seed_base + i;
    return list;
}

std::string RunConfig::to_ini() const {
    std::ostringstream text;
    text << "# resolved configuration of '" << command << "'; pass back with --config\n";
    auto str = [&](const char* key, const std::string& value) {
        if (!value.empty()) text << key << "=\"" << value << "\"\n";
    };
    auto boolean = [&](const char* key, bool value) { text << key << '=' << (value ? "true" : "false") << '\n'; };
    str("input", input);
    str("out", out);
    str("date-column", date_column);
    str("region-column", region_column);
    str("cases-column", cases_column);
    str("regions", regions);
    str("models", models);
    str("region", region);
    str("start", start);
    text << "tau=" << tau << '\n';
    text << "lag=" << lag << '\n';
    text << "trial-len=" << trial_len << '\n';
    text << "train-len=" << train_len << '\n';
    text << "step=" << step << '\n';
    text << "seeds=" << seeds << '\n';
    text << "seed-base=" << seed_base << '\n';
    text << "epochs=" << epochs << '\n';
    text << "lr=" << format_real(lr) << '\n';
    boolean("warm-start-ar", warm_start_ar);
    boolean("strict-stationarity", strict_stationarity);
    boolean("plots", plots);
    return text.str();
}

json RunConfig::to_json() const {
    // `out` and `threads` are left out: neither changes any number produced.
    return json{{"command", command},
                {"input", input},
                {"date_column", date_column},
                {"region_column", region_column},
                {"cases_column", cases_column},
                {"regions", regions},
                {"models", models},
                {"region", region},
                {"start", start},
                {"tau", tau},
                {"lag", lag},
                {"trial_len", trial_len},
                {"train_len", train_len},
                {"step", step},
                {"seeds", seed_list()},
                {"epochs", epochs},
                {"batch_size", 1},
                {"hidden_size", 1},
                {"adam", nn::AdamConfig{lr}},
                {"warm_start_ar", warm_start_ar},
                {"strict_stationarity", strict_stationarity},
                {"plots", plots}};
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) items.push_back(item.substr(b, e - b + 1));
    }
    return items;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f%%", v);
    return buf;
}

class Session {
public:
    Session(const RunConfig& config, std::ostream& out, std::ostream& err) : config_(config), out_(out), err_(err) {}

    int run() {
        fs::create_directories(config_.out);
        write_file(fs::path(config_.out) / "config.ini", config_.to_ini());
        if (config_.command == "ingest") return ingest();
        if (config_.command == "trial") return trial();
        if (config_.command == "sweep") return sweep();
        if (config_.command == "interpret") return interpret();
        throw InputError("unknown command '" + config_.command + "'");
    }

private:
    ingest::AlignedPanel load_panel() {
        const auto text = read_file(config_.input);
        if (text.find_first_not_of(" \t\r\n\xEF\xBB\xBF") == std::string::npos) {
            throw InputError(config_.input + ": no data rows");
        }
        const ingest::CsvColumns columns{config_.date_column, config_.region_column, config_.cases_column};
        ingest::ParseResult parsed;
        try {
            parsed = ingest::parse_csv(text, columns);
        } catch (const FormatError& e) {
            throw FormatError(config_.input + ": " + e.what());
        }
        if (parsed.observations.empty()) {
            throw InputError(config_.input + ": no data rows");
        }
        auto panel = ingest::align_regions(parsed.observations, parsed.missing);

        const auto wanted = split_list(config_.regions);
        if (!wanted.empty()) {
            std::map<std::string, TimeSeries> kept;
            for (const auto& name : wanted) {
                const auto it = panel.series.find(name);
                if (it == panel.series.end()) {
                    std::string known;
                    for (const auto& [r, s] : panel.series) known += (known.empty() ? "" : ", ") + r;
                    throw InputError("unknown region '" + name + "'; available: " + known);
                }
                kept.emplace(name, it->second);
            }
            panel.series = std::move(kept);
        }
        return panel;
    }

    std::map<std::string, TimeSeries> smoothed(const ingest::AlignedPanel& panel) const {
        std::map<std::string, TimeSeries> out;
        for (const auto& [region, series] : panel.series) {
            out.emplace(region, eval::smooth_series(series, config_.tau));
        }
        return out;
    }

    eval::TrialSpec shape() const {
        eval::TrialSpec s;
        s.trial_len = config_.trial_len;
        s.train_len = config_.train_len;
        s.lag = config_.lag;
        s.step = config_.step;
        return s;
    }

    eval::RunOptions options() const {
        eval::RunOptions o;
        o.seeds = config_.seed_list();
        o.train.epochs = config_.epochs;
        o.adam.learning_rate = config_.lr;
        o.adam.validate();
        o.warm_start_ar = config_.warm_start_ar;
        o.strict_stationarity = config_.strict_stationarity;
        return o;
    }

    std::vector<eval::ModelKind> kinds() const {
        std::vector<eval::ModelKind> chosen;
        for (const auto& name : split_list(config_.models)) {
            const auto kind = eval::parse_model_kind(name);
            if (!kind) {
                throw InputError("unknown model '" + name + "'; expected AR, LSTM, LSTM_DOUBLE or HYBRID");
            }
            if (std::find(chosen.begin(), chosen.end(), *kind) == chosen.end()) chosen.push_back(*kind);
        }
        if (chosen.empty()) {
            throw InputError("no models selected");
        }
        // Tables always follow the canonical column order.
        std::sort(chosen.begin(), chosen.end(), [](auto a, auto b) {
            return std::find(eval::kAllModels.begin(), eval::kAllModels.end(), a) <
                   std::find(eval::kAllModels.begin(), eval::kAllModels.end(), b);
        });
        return chosen;
    }

    /// The trial of --region starting at --start on the smoothed date axis.
    std::pair<const TimeSeries*, eval::TrialSpec> locate(const std::map<std::string, TimeSeries>& series) const {
        if (config_.region.empty() || config_.start.empty()) {
            throw InputError("--region and --start are required");
        }
        const auto it = series.find(config_.region);
        if (it == series.end()) {
            throw InputError("unknown region '" + config_.region + "'");
        }
        const auto& s = it->second;
        auto spec = shape();
        spec.region = config_.region;
        const auto date = parse_date(config_.start);
        if (!date) {
            throw InputError("--start '" + config_.start + "' is not a YYYY-MM-DD date");
        }
        const auto pos = std::find(s.dates.begin(), s.dates.end(), *date);
        const std::size_t index = static_cast<std::size_t>(pos - s.dates.begin());
        if (pos == s.dates.end() || index + spec.trial_len > s.size()) {
            std::string range = "none";
            if (s.size() >= spec.trial_len) {
                range = format_date(s.dates.front()) + " to " + format_date(s.dates[s.size() - spec.trial_len]);
            }
            throw InputError("start date " + config_.start + " is not a valid trial start for '" + config_.region +
                             "'; valid starts: " + range);
        }
        spec.start_index = index;
        spec.validate(s.size());
        return {&s, spec};
    }

    int ingest() {
        const auto panel = load_panel();
        write_file(fs::path(config_.out) / "panel.csv", ingest::write_panel_csv(panel));
        out_ << "regions: " << panel.series.size() << '\n';
        for (const auto& [region, series] : panel.series) {
            out_ << "  " << region << ": " << series.size() << " dates";
            if (!series.dates.empty()) {
                out_ << " (" << format_date(series.dates.front()) << " to " << format_date(series.dates.back())
                     << ')';
            }
            out_ << '\n';
        }
        out_ << "dropped dates: " << panel.dropped_dates.size() << '\n';
        for (const auto& d : panel.dropped_dates) out_ << "  " << format_date(d) << '\n';
        return kExitOk;
    }

    int trial() {
        const auto series = smoothed(load_panel());
        const auto [s, spec] = locate(series);
        const auto opts = options();

        std::vector<eval::TrialResult> results;
        for (auto kind : kinds()) {
            const auto t0 = std::chrono::steady_clock::now();
            results.push_back(eval::run_trial(*s, spec, kind, opts));
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            err_ << "timing: " << eval::to_string(kind) << ' ' << dt.count() << " s\n";
        }

        json doc{{"config", config_.to_json()}, {"results", results}};
        const fs::path dir(config_.out);
        write_file(dir / "trial.json", doc.dump(2) + '\n');
        write_file(dir / "trace.csv", eval::trace_csv(results));
        if (config_.plots) {
            write_file(dir / "trial.svg", plot::render_svg(plot::trial_chart(results)));
        }

        out_ << spec.region << " trial from " << results.front().start_date << '\n';
        for (const auto& r : results) {
            out_ << "  " << eval::display_name(r.model_kind) << ": MAPE " << percent(r.mean_mape) << " (sd "
                 << percent(r.sd_mape) << ')';
            if (r.alpha) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), ", alpha = %.3f", *r.alpha);
                out_ << buf;
            }
            if (!r.failures.empty()) out_ << ", " << r.failures.size() << " seed(s) failed";
            out_ << '\n';
        }
        return kExitOk;
    }

    int sweep() {
        const auto series = smoothed(load_panel());
        std::vector<eval::TrialSpec> trials;
        for (const auto& [region, s] : series) {
            auto base = shape();
            base.region = region;
            for (auto& t : eval::slice_trials(s.size(), base)) trials.push_back(std::move(t));
        }
        if (trials.empty()) {
            throw InputError("no region is long enough for a single trial");
        }
        const auto chosen = kinds();
        const auto t0 = std::chrono::steady_clock::now();
        const auto results = eval::run_trials(series, trials, chosen, options(), config_.threads);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        err_ << "timing: " << results.size() << " trial runs in " << dt.count() << " s\n";

        const auto table = eval::aggregate(results);
        std::size_t failed = 0;
        std::ostringstream rows;
        rows << "region,start_date,model,mean_mape,sd_mape,alpha,seeds_ok,seeds_failed,invalid\n";
        json trial_docs = json::array();
        for (const auto& r : results) {
            if (!r.failures.empty()) ++failed;
            rows << r.spec.region << ',' << r.start_date << ',' << eval::to_string(r.model_kind) << ','
                 << format_real(r.mean_mape) << ',' << format_real(r.sd_mape) << ','
                 << (r.alpha ? format_real(*r.alpha) : std::string()) << ',' << r.seeds.size() << ','
                 << r.failures.size() << ',' << (r.invalid ? "true" : "false") << '\n';
            json d{{"region", r.spec.region},       {"start_date", r.start_date},
                   {"start_index", r.spec.start_index}, {"model_kind", std::string(eval::to_string(r.model_kind))},
                   {"per_seed_mape", r.per_seed_mape}, {"mean_mape", r.mean_mape},
                   {"sd_mape", r.sd_mape},            {"invalid", r.invalid}};
            d["alpha"] = r.alpha ? json(*r.alpha) : json(nullptr);
            if (!r.failures.empty()) d["failures"] = json(r).at("failures");
            trial_docs.push_back(std::move(d));
        }

        const fs::path dir(config_.out);
        write_file(dir / "table.csv", table.to_csv());
        write_file(dir / "trials.csv", rows.str());
        json doc{{"config", config_.to_json()},
                 {"aggregate", table},
                 {"failed_trial_runs", failed},
                 {"trials", trial_docs}};
        write_file(dir / "sweep.json", doc.dump(2) + '\n');

        out_ << "trials: " << trials.size() << " across " << series.size() << " region(s)\n";
        out_ << table.summary_line() << '\n';
        out_ << "failed trial runs: " << failed << '\n';
        return kExitOk;
    }

    int interpret() {
        const auto series = smoothed(load_panel());
        const auto [s, spec] = locate(series);
        const auto result = eval::interpret_trial(*s, spec, config_.seed_base, options());

        std::ostringstream decomposition;
        decomposition << "row,prediction,alpha,ar_contribution,lstm_contribution,target\n";
        for (std::size_t r = 0; r < result.decomposition.size(); ++r) {
            const auto& d = result.decomposition[r];
            decomposition << (r + 1) << ',' << format_real(d.prediction) << ',' << format_real(d.alpha) << ','
                          << format_real(d.ar_contribution) << ',' << format_real(d.lstm_contribution) << ','
                          << format_real(d.target) << '\n';
        }

        char alpha[32];
        std::snprintf(alpha, sizeof(alpha), "%.3f", result.hybrid_model.alpha());
        const std::string title = spec.region + " from " + config_.start + ", alpha = " + alpha;

        const fs::path dir(config_.out);
        write_file(dir / "coefficients.txt", hybrid::to_text(result.coefficients));
        write_file(dir / "coefficients.csv", hybrid::to_csv(result.coefficients));
        write_file(dir / "decomposition.csv", decomposition.str());
        json doc{{"config", config_.to_json()},
                 {"spec", spec},
                 {"seed", config_.seed_base},
                 {"alpha", result.hybrid_model.alpha()},
                 {"ar_model", result.ar_model},
                 {"hybrid_model", result.hybrid_model},
                 {"coefficients", result.coefficients},
                 {"decomposition", result.decomposition},
                 {"ar_mape", result.ar_mape},
                 {"hybrid_mape", result.hybrid_mape}};
        write_file(dir / "interpret.json", doc.dump(2) + '\n');
        if (config_.plots) {
            write_file(dir / "interpret.svg", plot::render_svg(plot::interpret_chart(result, title)));
        }

        out_ << title << '\n' << hybrid::to_text(result.coefficients);
        out_ << "test MAPE: AR " << percent(result.ar_mape) << ", Hybrid " << percent(result.hybrid_mape) << '\n';
        return kExitOk;
    }

    const RunConfig& config_;
    std::ostream& out_;
    std::ostream& err_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig config;
    CLI::App app{"Hybrid AR + LSTM forecasting of daily case counts", "arlstm"};
    app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--input", config.input, "Long-format CSV with date, region and cases columns");
    app.add_option("--out", config.out, "Output directory")->capture_default_str();
    app.add_option("--date-column", config.date_column)->capture_default_str();
    app.add_option("--region-column", config.region_column)->capture_default_str();
    app.add_option("--cases-column", config.cases_column)->capture_default_str();
    app.add_option("--regions", config.regions, "Comma-separated regions to keep (default: all)");
    app.add_option("--models", config.models, "Comma-separated subset of AR,LSTM,LSTM_DOUBLE,HYBRID")
        ->capture_default_str();
    app.add_option("--region", config.region, "Region of a single trial");
    app.add_option("--start", config.start, "First smoothed date of a single trial (YYYY-MM-DD)");
    app.add_option("--tau", config.tau, "Smoothing window")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--lag", config.lag)->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--trial-len", config.trial_len)->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--train-len", config.train_len)->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--step", config.step)->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seeds", config.seeds, "Number of seeds per trial")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed-base", config.seed_base, "First seed; seeds run base, base+1, ...")
        ->capture_default_str();
    app.add_option("--epochs", config.epochs)->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--lr", config.lr, "Adam learning rate")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--warm-start-ar", config.warm_start_ar, "Start the hybrid's AR branch from the OLS fit");
    app.add_flag("--strict-stationarity", config.strict_stationarity,
                 "Fail a trial whose differenced series is not judged stationary");
    app.add_flag("--plots", config.plots, "Write SVG plots");
    app.add_option("--threads", config.threads, "Worker threads for sweeps (0: all cores)")->capture_default_str();

    app.add_subcommand("ingest", "Align regions on common dates and write the panel");
    app.add_subcommand("trial", "Run one trial for each selected model");
    app.add_subcommand("sweep", "Run every trial of every region and aggregate");
    app.add_subcommand("interpret", "Compare AR and hybrid coefficients on one trial");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInput;
    }
    config.command = app.get_subcommands().front()->get_name();

    try {
        if (config.input.empty()) {
            throw InputError("--input is required");
        }
        return Session(config, out, err).run();
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace arlstm::cli
