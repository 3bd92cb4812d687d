#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arlstm {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
[[nodiscard]] std::optional<Date> parse_date(std::string_view text);
[[nodiscard]] std::string format_date(const Date& date);

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] std::string format_real(double value);

/// Ordered observations of one region. Indexing downstream is positional;
/// dates are kept for reporting only.
struct TimeSeries {
    std::string region;
    std::vector<Date> dates;
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

}  // namespace arlstm

namespace arlstm::ingest {

struct RawObservation {
    Date date;
    std::string region;
    double cases = 0.0;  // >= 0
};

/// A data row whose cases field was empty or not a number.
struct MissingEntry {
    Date date;
    std::string region;
    std::size_t line = 0;
};

struct CsvColumns {
    std::string date = "date";
    std::string region = "area";
    std::string cases = "cases";
};

struct ParseResult {
    std::vector<RawObservation> observations;
    std::vector<MissingEntry> missing;
};

/// Parses long-format CSV (one row per region and date).
///
/// Throws FormatError when the header lacks one of the configured columns,
/// when a date does not parse, or when a case count is negative. Rows with
/// an empty or non-numeric cases field go to `missing`.
[[nodiscard]] ParseResult parse_csv(std::string_view text, const CsvColumns& columns = {});

/// Serialises observations back to long-format CSV using `columns` as header.
[[nodiscard]] std::string write_csv(std::span<const RawObservation> observations,
                                    const CsvColumns& columns = {});

struct AlignedPanel {
    std::map<std::string, TimeSeries> series;
    std::vector<Date> dropped_dates;

    [[nodiscard]] std::size_t length() const noexcept {
        return series.empty() ? 0 : series.begin()->second.size();
    }
};

/// Puts every region on a common date axis. A date is kept only when every
/// region has a value for it and no region flagged it missing.
///
/// Throws AlignmentError when there is no region, when a region/date pair is
/// duplicated, or when a region has no surviving dates.
[[nodiscard]] AlignedPanel align_regions(std::span<const RawObservation> observations,
                                         std::span<const MissingEntry> missing = {});

/// Wide CSV: a `date` column followed by one column per region.
[[nodiscard]] std::string write_panel_csv(const AlignedPanel& panel);

}  // namespace arlstm::ingest
