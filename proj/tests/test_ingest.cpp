#include <doctest.h>

#include <sstream>
#include <vector>

#include "corrnet/ingest.hpp"
#include "helpers.hpp"

using namespace corrnet;
using testutil::write_file;

namespace {

const char* kSmallPanel =
    "date,AA,BB\n"
    "2020-01-01,1.0,2.0\n"
    "2020-01-02,1.5,2.5\n"
    "2020-01-03,2.0,3.0\n"
    "2020-01-06,2.5,3.5\n";

}  // namespace

TEST_CASE("load_panel reads an aligned panel") {
    const auto path = write_file("ingest_small.csv", kSmallPanel);
    const auto panel = ingest::load_panel(path);
    CHECK(panel.names == std::vector<std::string>{"AA", "BB"});
    CHECK(panel.rows() == 4);
    CHECK(panel.dates.front() == "2020-01-01");
    CHECK(panel.dates.back() == "2020-01-06");
    CHECK(panel.values(0, 0) == doctest::Approx(1.0));
    CHECK(panel.values(3, 1) == doctest::Approx(3.5));
}

TEST_CASE("load_panel sorts rows by date") {
    const auto path = write_file("ingest_unsorted.csv",
                                 "date,AA\n"
                                 "2020-01-03,3\n"
                                 "2020-01-01,1\n"
                                 "2020-01-02,2\n");
    const auto panel = ingest::load_panel(path);
    CHECK(panel.dates == std::vector<std::string>{"2020-01-01", "2020-01-02", "2020-01-03"});
    CHECK(panel.values(0, 0) == 1.0);
    CHECK(panel.values(2, 0) == 3.0);
}

TEST_CASE("load_panel forward-fills short gaps without touching other cells") {
    const auto path = write_file("ingest_gap.csv",
                                 "date,AA,BB\n"
                                 "2020-01-01,1.0,5.0\n"
                                 "2020-01-02,,6.0\n"
                                 "2020-01-03,3.0,7.0\n");
    const auto panel = ingest::load_panel(path);
    CHECK(panel.values(1, 0) == 1.0);  // filled from the previous row
    CHECK(panel.values(1, 1) == 6.0);
    CHECK(panel.values(2, 0) == 3.0);
}

TEST_CASE("load_panel drops rows where every entity is missing") {
    const auto path = write_file("ingest_allmissing.csv",
                                 "date,AA,BB\n"
                                 "2020-01-01,1.0,5.0\n"
                                 "2020-01-02,,\n"
                                 "2020-01-03,3.0,7.0\n");
    const auto panel = ingest::load_panel(path);
    CHECK(panel.rows() == 2);
    CHECK(panel.dates == std::vector<std::string>{"2020-01-01", "2020-01-03"});
}

TEST_CASE("load_panel rejects gaps beyond the limit, naming the entity") {
    std::string csv = "date,AA,BB\n2020-01-01,1.0,5.0\n";
    for (int day = 2; day <= 8; ++day)
        csv += "2020-01-0" + std::to_string(day) + ",,"
               + std::to_string(4.0 + day) + "\n";
    csv += "2020-01-09,2.0,13.0\n";
    const auto path = write_file("ingest_longgap.csv", csv);
    CHECK_THROWS_WITH_AS(ingest::load_panel(path), doctest::Contains("AA"), DataError);
    CHECK_NOTHROW(ingest::load_panel(path, 7));
}

TEST_CASE("load_panel rejects an entity missing at the start") {
    const auto path = write_file("ingest_leading.csv",
                                 "date,AA,BB\n"
                                 "2020-01-01,,5.0\n"
                                 "2020-01-02,2.0,6.0\n");
    CHECK_THROWS_WITH_AS(ingest::load_panel(path), doctest::Contains("AA"), DataError);
}

TEST_CASE("load_panel rejects malformed input") {
    SUBCASE("unparsable cell names row and entity") {
        const auto path = write_file("ingest_badcell.csv",
                                     "date,AA\n2020-01-01,1.0\n2020-01-02,oops\n");
        CHECK_THROWS_WITH_AS(ingest::load_panel(path), doctest::Contains("AA"), ParseError);
    }
    SUBCASE("bad date") {
        const auto path = write_file("ingest_baddate.csv", "date,AA\n2020-13-01,1.0\n");
        CHECK_THROWS_AS(ingest::load_panel(path), ParseError);
    }
    SUBCASE("duplicate date") {
        const auto path = write_file("ingest_dupdate.csv",
                                     "date,AA\n2020-01-01,1.0\n2020-01-01,2.0\n");
        CHECK_THROWS_AS(ingest::load_panel(path), DataError);
    }
    SUBCASE("duplicate entity") {
        const auto path = write_file("ingest_dupname.csv", "date,AA,AA\n2020-01-01,1.0,2.0\n");
        CHECK_THROWS_AS(ingest::load_panel(path), DataError);
    }
    SUBCASE("single row") {
        const auto path = write_file("ingest_onerow.csv", "date,AA\n2020-01-01,1.0\n");
        CHECK_THROWS_AS(ingest::load_panel(path), DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(ingest::load_panel("/nonexistent/panel.csv"), DataError);
    }
}

TEST_CASE("slice_panel restricts to an inclusive date range") {
    const auto path = write_file("ingest_slice.csv", kSmallPanel);
    const auto panel = ingest::load_panel(path);
    const auto mid = ingest::slice_panel(panel, "2020-01-02", "2020-01-03");
    CHECK(mid.rows() == 2);
    CHECK(mid.dates.front() == "2020-01-02");
    const auto open = ingest::slice_panel(panel, "", "");
    CHECK(open.rows() == 4);
    const auto from_only = ingest::slice_panel(panel, "2020-01-03", "");
    CHECK(from_only.rows() == 2);
}

TEST_CASE("window_count follows the sliding rule") {
    CHECK(ingest::window_count(140, {120, 10}) == 3);
    CHECK(ingest::window_count(2615, {120, 10}) == 250);
    CHECK(ingest::window_count(119, {120, 10}) == 0);
    CHECK(ingest::window_count(120, {120, 10}) == 1);
    CHECK(ingest::window_count(129, {120, 10}) == 1);
    CHECK_THROWS_AS(ingest::window_count(100, {0, 10}), SpecError);
}

TEST_CASE("windows overlap in length minus displacement rows") {
    ingest::YieldPanel panel;
    panel.names = {"AA"};
    const int rows = 30;
    panel.values.resize(rows, 1);
    for (int t = 0; t < rows; ++t) {
        panel.values(t, 0) = t;
        panel.dates.push_back("2020-01-" + std::string(t + 1 < 10 ? "0" : "") +
                              std::to_string(t + 1));
    }
    const ingest::WindowSpec spec{20, 5};
    const auto ws = ingest::windows(panel, spec);
    REQUIRE(ws.size() == 3);
    CHECK(ws[0].start_date == "2020-01-01");
    CHECK(ws[0].end_date == "2020-01-20");
    CHECK(ws[1].start_date == "2020-01-06");
    for (size_t k = 0; k + 1 < ws.size(); ++k) {
        // Last length-displacement rows of window k equal the first rows of k+1.
        CHECK(ws[k].values.bottomRows(15).isApprox(ws[k + 1].values.topRows(15)));
    }
    ingest::YieldPanel tiny = panel;
    tiny.values.conservativeResize(10, 1);
    tiny.dates.resize(10);
    CHECK_THROWS_AS(ingest::windows(tiny, {20, 5}), DataError);
}

TEST_CASE("lag1_autocorr is the correlation of consecutive pairs") {
    const std::vector<double> alternating{1.0, -1.0, 1.0, -1.0, 1.0, -1.0};
    CHECK(ingest::lag1_autocorr(alternating) == doctest::Approx(-1.0));
    const std::vector<double> constant{2.0, 2.0, 2.0, 2.0};
    CHECK_THROWS_AS(ingest::lag1_autocorr(constant), NumericError);
    const std::vector<double> short_series{1.0, 2.0};
    CHECK_THROWS_AS(ingest::lag1_autocorr(short_series), NumericError);
}

TEST_CASE("summary_stats matches the hand-computed oracle") {
    const std::vector<double> s{1.2, 0.8, 1.5, 0.9, 2.0, 1.1, 0.7, 1.6};
    const auto row = ingest::summary_stats(s);
    CHECK(row.min == doctest::Approx(0.7));
    CHECK(row.max == doctest::Approx(2.0));
    CHECK(row.mean == doctest::Approx(1.225).epsilon(1e-12));
    CHECK(row.variance == doctest::Approx(0.174375).epsilon(1e-12));
    CHECK(row.skewness == doctest::Approx(0.4828099516848796).epsilon(1e-12));
    CHECK(row.kurtosis == doctest::Approx(2.0811269125525107).epsilon(1e-12));
    CHECK(row.ac1 == doctest::Approx(-0.6660097377162094).epsilon(1e-12));
    CHECK(row.ac2_1 == doctest::Approx(-0.14405595380859826).epsilon(1e-12));
}

TEST_CASE("summary_stats sign flip negates skewness only") {
    const std::vector<double> s{1.2, 0.8, 1.5, 0.9, 2.0, 1.1, 0.7, 1.6};
    std::vector<double> neg(s.size());
    for (size_t i = 0; i < s.size(); ++i) neg[i] = -s[i];
    const auto a = ingest::summary_stats(s);
    const auto b = ingest::summary_stats(neg);
    CHECK(b.skewness == doctest::Approx(-a.skewness).epsilon(1e-12));
    CHECK(b.variance == doctest::Approx(a.variance).epsilon(1e-12));
    CHECK(b.kurtosis == doctest::Approx(a.kurtosis).epsilon(1e-12));
    CHECK(b.ac1 == doctest::Approx(a.ac1).epsilon(1e-12));
    CHECK(b.min == doctest::Approx(-a.max));
}

TEST_CASE("summary_stats rejects degenerate series") {
    const std::vector<double> constant{1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(ingest::summary_stats(constant), NumericError);
    // Alternating series: the squared differences are constant, so ac2_1
    // is undefined even though every other statistic exists.
    const std::vector<double> alternating{0.0, 1.0, 0.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(ingest::summary_stats(alternating), NumericError);
}

TEST_CASE("write_summary_csv emits one labeled row per entity") {
    const auto path = write_file("ingest_csvout.csv", kSmallPanel);
    const auto panel = ingest::load_panel(path);
    std::vector<ingest::SummaryRow> rows;
    ingest::SummaryRow r;
    r.min = 1.0;
    r.max = 2.5;
    r.mean = 1.75;
    rows.push_back(r);
    rows.push_back(r);
    std::ostringstream out;
    ingest::write_summary_csv(out, panel, rows);
    const auto text = out.str();
    CHECK(text.rfind("name,min,max,mean,variance,skewness,kurtosis,ac1,ac2_1\n", 0) == 0);
    CHECK(text.find("\nAA,1,2.5,1.75,") != std::string::npos);
    CHECK(text.find("\nBB,") != std::string::npos);
}
