#include <doctest.h>

#include <fstream>
#include <sstream>

#include "arlstm/error.hpp"
#include "arlstm/ingest.hpp"

using namespace arlstm;
using namespace arlstm::ingest;

namespace {

const std::string kHeader = "date,area,cases\n";

Date ymd(int y, unsigned m, unsigned d) {
    return std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d};
}

std::string fixture_text() {
    std::ifstream in(ARLSTM_FIXTURE_CSV);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("dates parse strictly and print back unchanged") {
    CHECK(parse_date("2020-02-01") == ymd(2020, 2, 1));
    CHECK(format_date(ymd(2021, 3, 7)) == "2021-03-07");
    CHECK_FALSE(parse_date("2020-2-01"));
    CHECK_FALSE(parse_date("2020-02-30"));
    CHECK_FALSE(parse_date("02/01/2020"));
    CHECK_FALSE(parse_date("2020-02-01x"));
}

TEST_CASE("format_real round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.123, 5.0}) {
        CHECK(std::stod(format_real(v)) == v);
    }
    CHECK(format_real(5.0) == "5");
}

TEST_CASE("one well-formed row") {
    const auto r = parse_csv(kHeader + "2020-02-01,Los Angeles,5\n");
    REQUIRE(r.observations.size() == 1);
    CHECK(r.observations[0].date == ymd(2020, 2, 1));
    CHECK(r.observations[0].region == "Los Angeles");
    CHECK(r.observations[0].cases == 5.0);
    CHECK(r.missing.empty());
}

TEST_CASE("empty cases field is reported as missing") {
    const auto r = parse_csv(kHeader + "2020-02-01,Orange,\n");
    CHECK(r.observations.empty());
    REQUIRE(r.missing.size() == 1);
    CHECK(r.missing[0].region == "Orange");
    CHECK(r.missing[0].line == 2);
}

TEST_CASE("header only gives no rows and no error") {
    const auto r = parse_csv(kHeader);
    CHECK(r.observations.empty());
    CHECK(r.missing.empty());
}

TEST_CASE("quoted fields, CRLF, BOM and reordered columns") {
    const std::string text = "\xEF\xBB\xBF" "cases,\"area\",date\r\n12,\"San Diego, County\",2020-03-01\r\n";
    const auto r = parse_csv(text);
    REQUIRE(r.observations.size() == 1);
    CHECK(r.observations[0].region == "San Diego, County");
    CHECK(r.observations[0].cases == 12.0);
}

TEST_CASE("custom column names") {
    const auto r = parse_csv("day,county,n\n2020-03-01,A,3\n", CsvColumns{"day", "county", "n"});
    REQUIRE(r.observations.size() == 1);
    CHECK_THROWS_AS((void)parse_csv("day,county,n\n2020-03-01,A,3\n"), FormatError);
}

TEST_CASE("row errors carry the line number") {
    try {
        (void)parse_csv(kHeader + "2020-02-01,A,1\n2020-13-01,A,2\n");
        FAIL("expected a format error");
    } catch (const FormatError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse_csv(kHeader + "2020-02-01,A,-4\n"), FormatError);
    CHECK_THROWS_AS((void)parse_csv(kHeader + "2020-02-01,A\n"), FormatError);
    CHECK_THROWS_AS((void)parse_csv("when,where,what\n"), FormatError);
    CHECK_THROWS_AS((void)parse_csv(""), FormatError);
}

TEST_CASE("write_csv parses back to the same observations") {
    const auto first = parse_csv(kHeader + "2020-02-01,A,1.5\n2020-02-02,\"B,C\",2\n");
    const auto again = parse_csv(write_csv(first.observations));
    REQUIRE(again.observations.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(again.observations[i].date == first.observations[i].date);
        CHECK(again.observations[i].region == first.observations[i].region);
        CHECK(again.observations[i].cases == first.observations[i].cases);
    }
}

TEST_CASE("single region passes through in date order") {
    const auto r = parse_csv(kHeader + "2020-02-03,A,3\n2020-02-01,A,1\n2020-02-02,A,2\n");
    const auto panel = align_regions(r.observations, r.missing);
    REQUIRE(panel.series.size() == 1);
    const auto& s = panel.series.at("A");
    CHECK(s.values == std::vector<double>{1, 2, 3});
    CHECK(s.dates.front() == ymd(2020, 2, 1));
    CHECK(panel.dropped_dates.empty());
}

TEST_CASE("a date missing in one region is dropped everywhere") {
    const auto r = parse_csv(kHeader +
                             "2020-02-01,A,1\n2020-02-01,B,10\n"
                             "2020-02-02,A,2\n2020-02-02,B,\n"
                             "2020-02-03,A,3\n2020-02-03,B,30\n"
                             "2020-02-04,A,4\n");
    const auto panel = align_regions(r.observations, r.missing);
    CHECK(panel.length() == 2);
    CHECK(panel.series.at("A").values == std::vector<double>{1, 3});
    CHECK(panel.series.at("B").values == std::vector<double>{10, 30});
    CHECK(panel.dropped_dates == std::vector<Date>{ymd(2020, 2, 2), ymd(2020, 2, 4)});
}

TEST_CASE("alignment errors") {
    SUBCASE("disjoint dates name the region") {
        const auto r = parse_csv(kHeader + "2020-02-01,A,1\n2020-02-02,B,2\n");
        try {
            (void)align_regions(r.observations, r.missing);
            FAIL("expected an alignment error");
        } catch (const AlignmentError& e) {
            CHECK(std::string(e.what()).find("region '") != std::string::npos);
        }
    }
    SUBCASE("duplicates") {
        const auto r = parse_csv(kHeader + "2020-02-01,A,1\n2020-02-01,A,2\n");
        CHECK_THROWS_AS((void)align_regions(r.observations, r.missing), AlignmentError);
    }
    SUBCASE("nothing to align") {
        CHECK_THROWS_AS((void)align_regions({}, {}), AlignmentError);
    }
}

TEST_CASE("bundled fixture: eight regions of 948 aligned dates") {
    const auto r = parse_csv(fixture_text());
    CHECK(r.missing.size() == 1);
    const auto panel = align_regions(r.observations, r.missing);
    CHECK(panel.series.size() == 8);
    for (const auto& [region, s] : panel.series) {
        CHECK(s.size() == 948);
        CHECK(s.dates.size() == 948);
    }
    CHECK(panel.dropped_dates.size() == 1);
}

TEST_CASE("panel CSV has a date column and one column per region") {
    const auto r = parse_csv(kHeader + "2020-02-01,B,1\n2020-02-01,A,2\n2020-02-02,A,3\n2020-02-02,B,4\n");
    const auto text = write_panel_csv(align_regions(r.observations, r.missing));
    CHECK(text == "date,A,B\n2020-02-01,2,1\n2020-02-02,3,4\n");
}
