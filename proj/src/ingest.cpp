#include "arlstm/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "arlstm/error.hpp"

namespace arlstm {

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int value = 0;
        const char* first = text.data() + pos;
        const char* last = first + len;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) {
            return std::nullopt;
        }
        return value;
    };
    const auto y = field(0, 4);
    const auto m = field(5, 2);
    const auto d = field(8, 2);
    if (!y || !m || !d) {
        return std::nullopt;
    }
    const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                    std::chrono::day{static_cast<unsigned>(*d)}};
    if (!date.ok()) {
        return std::nullopt;
    }
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::string format_real(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace arlstm

namespace arlstm::ingest {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// Splits one CSV record, honouring double-quoted fields with "" escapes.
std::vector<std::string> split_record(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (quoted) {
        throw FormatError("unterminated quoted field", line_no);
    }
    fields.emplace_back(trim(current));
    return fields;
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) {
        return std::nullopt;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::string quote_if_needed(const std::string& field) {
    if (field.find_first_of(",\"") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

}  // namespace

ParseResult parse_csv(std::string_view text, const CsvColumns& columns) {
    // Strip a UTF-8 byte order mark.
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }

    ParseResult result;
    std::size_t line_no = 0;
    std::optional<std::size_t> date_col, region_col, cases_col;
    std::size_t header_width = 0;
    bool have_header = false;

    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split_record(line, line_no);

        if (!have_header) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i] == columns.date) date_col = i;
                if (fields[i] == columns.region) region_col = i;
                if (fields[i] == columns.cases) cases_col = i;
            }
            if (!date_col || !region_col || !cases_col) {
                throw FormatError("header must name columns '" + columns.date + "', '" +
                                      columns.region + "' and '" + columns.cases + "'",
                                  line_no);
            }
            header_width = fields.size();
            have_header = true;
            continue;
        }

        if (fields.size() < header_width) {
            throw FormatError("expected " + std::to_string(header_width) + " fields, got " +
                                  std::to_string(fields.size()),
                              line_no);
        }
        const auto date = parse_date(fields[*date_col]);
        if (!date) {
            throw FormatError("unparseable date '" + fields[*date_col] + "'", line_no);
        }
        const std::string& region = fields[*region_col];
        if (region.empty()) {
            throw FormatError("empty region", line_no);
        }
        const auto cases = parse_number(fields[*cases_col]);
        if (!cases) {
            result.missing.push_back({*date, region, line_no});
            continue;
        }
        if (*cases < 0.0) {
            throw FormatError("negative case count", line_no);
        }
        result.observations.push_back({*date, region, *cases});
    }

    if (!have_header) {
        throw FormatError("missing header row");
    }
    return result;
}

std::string write_csv(std::span<const RawObservation> observations, const CsvColumns& columns) {
    std::ostringstream out;
    out << quote_if_needed(columns.date) << ',' << quote_if_needed(columns.region) << ','
        << quote_if_needed(columns.cases) << '\n';
    for (const auto& obs : observations) {
        out << format_date(obs.date) << ',' << quote_if_needed(obs.region) << ','
            << format_real(obs.cases) << '\n';
    }
    return out.str();
}

AlignedPanel align_regions(std::span<const RawObservation> observations,
                           std::span<const MissingEntry> missing) {
    std::map<std::string, std::map<std::chrono::sys_days, double>> by_region;
    std::set<std::chrono::sys_days> all_dates;
    std::set<std::chrono::sys_days> flagged;

    for (const auto& obs : observations) {
        const std::chrono::sys_days day{obs.date};
        auto [it, inserted] = by_region[obs.region].emplace(day, obs.cases);
        if (!inserted) {
            throw AlignmentError("duplicate observation for region '" + obs.region + "' on " +
                                 format_date(obs.date));
        }
        all_dates.insert(day);
    }
    for (const auto& m : missing) {
        by_region.try_emplace(m.region);
        flagged.insert(std::chrono::sys_days{m.date});
        all_dates.insert(std::chrono::sys_days{m.date});
    }
    if (by_region.empty()) {
        throw AlignmentError("no regions to align");
    }

    AlignedPanel panel;
    std::vector<std::chrono::sys_days> kept;
    for (const auto day : all_dates) {
        bool keep = !flagged.contains(day);
        for (const auto& [region, values] : by_region) {
            keep = keep && values.contains(day);
        }
        if (keep) {
            kept.push_back(day);
        } else {
            panel.dropped_dates.emplace_back(day);
        }
    }

    for (const auto& [region, values] : by_region) {
        if (kept.empty()) {
            throw AlignmentError("region '" + region + "' has no dates shared with all regions");
        }
        TimeSeries ts;
        ts.region = region;
        ts.dates.reserve(kept.size());
        ts.values.reserve(kept.size());
        for (const auto day : kept) {
            ts.dates.emplace_back(day);
            ts.values.push_back(values.at(day));
        }
        panel.series.emplace(region, std::move(ts));
    }
    return panel;
}

std::string write_panel_csv(const AlignedPanel& panel) {
    std::ostringstream out;
    out << "date";
    for (const auto& [region, ts] : panel.series) {
        out << ',' << quote_if_needed(region);
    }
    out << '\n';
    const std::size_t n = panel.length();
    for (std::size_t t = 0; t < n; ++t) {
        out << format_date(panel.series.begin()->second.dates[t]);
        for (const auto& [region, ts] : panel.series) {
            out << ',' << format_real(ts.values[t]);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace arlstm::ingest
