#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "arlstm/eval.hpp"
#include "arlstm/ingest.hpp"

namespace testing {

/// Smoothed series of every region in the bundled fixture, loaded once.
inline const std::map<std::string, arlstm::TimeSeries>& fixture_smoothed() {
    static const auto series = [] {
        std::ifstream in(ARLSTM_FIXTURE_CSV);
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto parsed = arlstm::ingest::parse_csv(buf.str());
        const auto panel = arlstm::ingest::align_regions(parsed.observations, parsed.missing);
        std::map<std::string, arlstm::TimeSeries> out;
        for (const auto& [region, s] : panel.series) out.emplace(region, arlstm::eval::smooth_series(s, 7));
        return out;
    }();
    return series;
}

inline arlstm::eval::TrialSpec fixture_trial(const std::string& region, std::size_t start_index) {
    arlstm::eval::TrialSpec spec;
    spec.region = region;
    spec.start_index = start_index;
    return spec;
}

inline arlstm::eval::PreparedTrial prepared(const std::string& region, std::size_t start_index) {
    return arlstm::eval::prepare_trial(fixture_smoothed().at(region).values, fixture_trial(region, start_index));
}

}  // namespace testing
