#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace arlstm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInput = 2;

/// Every knob a command reads, after flags, config file and defaults have
/// been merged (flags win over the file, the file over defaults).
struct RunConfig {
    std::string command;
    std::string input;
    std::string out = "out";
    std::string date_column = "date";
    std::string region_column = "area";
    std::string cases_column = "cases";
    std::string regions;  // comma separated, empty = all
    std::string models = "AR,LSTM,LSTM_DOUBLE,HYBRID";
    std::string region;   // trial / interpret
    std::string start;    // trial / interpret, YYYY-MM-DD on the smoothed axis
    std::size_t tau = 7;
    std::size_t lag = 7;
    std::size_t trial_len = 88;
    std::size_t train_len = 63;
    std::size_t step = 7;
    std::size_t seeds = 100;
    std::uint64_t seed_base = 0;
    std::size_t epochs = 100;
    double lr = 0.001;
    bool warm_start_ar = false;
    bool strict_stationarity = false;
    bool plots = false;
    std::size_t threads = 0;  // 0 = all cores; never affects results

    [[nodiscard]] std::vector<std::uint64_t> seed_list() const;
    /// Flat key=value text accepted back by --config.
    [[nodiscard]] std::string to_ini() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Parses `args` (without the program name), runs the command and returns
/// the exit code. Normal output goes to `out`; diagnostics and timings go
/// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arlstm::cli
