#include "corrnet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "corrnet/io.hpp"

namespace corrnet::ingest {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string token;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(token);
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    fields.push_back(token);
    return fields;
}

std::string trim(const std::string& value) {
    const auto first = value.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = value.find_last_not_of(" \t\r\n");
    return value.substr(first, last - first + 1);
}

bool valid_iso_date(const std::string& d) {
    if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (d[i] < '0' || d[i] > '9') return false;
    }
    const int month = (d[5] - '0') * 10 + (d[6] - '0');
    const int day = (d[8] - '0') * 10 + (d[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col,
                  const std::string& entity) {
    const std::string cell = trim(raw);
    if (cell.empty()) return kMissing;
    double value = 0.0;
    const auto* begin = cell.data();
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("unparsable cell '" + cell + "' at row " +
                         std::to_string(row) + ", column " + std::to_string(col) +
                         " (" + entity + ")");
    }
    return value;
}

struct RawRow {
    std::string date;
    std::vector<double> cells;  // NaN = missing
};

// Forward-fills one entity column in place. Leading gaps are rejected;
// runs longer than gap_limit are a data-quality error naming the range.
void fill_column(std::vector<RawRow>& rows, std::size_t col,
                 const std::string& entity, int gap_limit) {
    if (std::isnan(rows.front().cells[col])) {
        throw DataError("entity '" + entity + "' has no value at the start of the panel (" +
                        rows.front().date + ")");
    }
    std::size_t t = 1;
    while (t < rows.size()) {
        if (!std::isnan(rows[t].cells[col])) {
            ++t;
            continue;
        }
        std::size_t run_end = t;
        while (run_end < rows.size() && std::isnan(rows[run_end].cells[col])) ++run_end;
        const std::size_t run = run_end - t;
        if (run > static_cast<std::size_t>(gap_limit)) {
            throw DataError("entity '" + entity + "' has a gap of " + std::to_string(run) +
                            " consecutive missing values from " + rows[t].date + " to " +
                            rows[run_end - 1].date + " (limit " + std::to_string(gap_limit) + ")");
        }
        const double carried = rows[t - 1].cells[col];
        for (std::size_t k = t; k < run_end; ++k) rows[k].cells[col] = carried;
        t = run_end;
    }
}

double pearson_pairs(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw NumericError("lag-1 autocorrelation undefined: differenced series is constant");
    }
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace

YieldPanel load_panel(const std::filesystem::path& path, int gap_limit) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open input file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty input file: " + path.string());
    }
    auto header = split_line(line);
    for (auto& h : header) h = trim(h);
    if (header.size() < 2 || header[0] != "date") {
        throw ParseError("header must be 'date,<name1>,<name2>,...' in " + path.string());
    }
    std::vector<std::string> names(header.begin() + 1, header.end());
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].empty()) {
            throw ParseError("empty entity name in column " + std::to_string(i + 2));
        }
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            if (names[i] == names[j]) {
                throw DataError("duplicate entity label '" + names[i] + "'");
            }
        }
    }

    std::vector<RawRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != header.size()) {
            throw ParseError("row " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        }
        RawRow row;
        row.date = trim(fields[0]);
        if (!valid_iso_date(row.date)) {
            throw ParseError("bad ISO-8601 date '" + row.date + "' at row " +
                             std::to_string(line_no));
        }
        row.cells.resize(names.size());
        bool any_value = false;
        for (std::size_t c = 0; c < names.size(); ++c) {
            row.cells[c] = parse_cell(fields[c + 1], line_no, c + 2, names[c]);
            any_value = any_value || !std::isnan(row.cells[c]);
        }
        // A date on which no entity traded carries no alignment information.
        if (any_value) rows.push_back(std::move(row));
    }

    std::sort(rows.begin(), rows.end(),
              [](const RawRow& a, const RawRow& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw DataError("duplicate date " + rows[i].date);
        }
    }
    if (rows.size() < 2) {
        throw DataError("panel needs at least 2 rows, got " + std::to_string(rows.size()));
    }

    for (std::size_t c = 0; c < names.size(); ++c) {
        fill_column(rows, c, names[c], gap_limit);
    }

    YieldPanel panel;
    panel.names = std::move(names);
    panel.dates.reserve(rows.size());
    panel.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(panel.names.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        panel.dates.push_back(rows[t].date);
        for (std::size_t c = 0; c < panel.names.size(); ++c) {
            panel.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) =
                rows[t].cells[c];
        }
    }
    return panel;
}

YieldPanel slice_panel(const YieldPanel& panel, const std::string& from,
                       const std::string& to) {
    std::vector<Eigen::Index> keep;
    for (std::size_t t = 0; t < panel.dates.size(); ++t) {
        if (!from.empty() && panel.dates[t] < from) continue;
        if (!to.empty() && panel.dates[t] > to) continue;
        keep.push_back(static_cast<Eigen::Index>(t));
    }
    if (keep.size() < 2) {
        throw DataError("date filter leaves " + std::to_string(keep.size()) +
                        " rows; at least 2 required");
    }
    YieldPanel out;
    out.names = panel.names;
    out.dates.reserve(keep.size());
    out.values.resize(static_cast<Eigen::Index>(keep.size()), panel.cols());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.dates.push_back(panel.dates[static_cast<std::size_t>(keep[k])]);
        out.values.row(static_cast<Eigen::Index>(k)) = panel.values.row(keep[k]);
    }
    return out;
}

std::size_t window_count(std::size_t rows, const WindowSpec& spec) {
    if (spec.length <= 0 || spec.displacement <= 0) {
        throw SpecError("window length and displacement must be positive");
    }
    if (static_cast<std::size_t>(spec.length) > rows) return 0;
    return (rows - static_cast<std::size_t>(spec.length)) /
               static_cast<std::size_t>(spec.displacement) +
           1;
}

std::vector<Window> windows(const YieldPanel& panel, const WindowSpec& spec) {
    const std::size_t rows = static_cast<std::size_t>(panel.rows());
    if (static_cast<std::size_t>(spec.length) > rows) {
        throw DataError("window length " + std::to_string(spec.length) +
                        " exceeds panel rows " + std::to_string(rows) +
                        "; no window can be emitted");
    }
    const std::size_t count = window_count(rows, spec);
    std::vector<Window> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t start = k * static_cast<std::size_t>(spec.displacement);
        Window w;
        w.start_date = panel.dates[start];
        w.end_date = panel.dates[start + static_cast<std::size_t>(spec.length) - 1];
        w.values = panel.values.middleRows(static_cast<Eigen::Index>(start), spec.length);
        out.push_back(std::move(w));
    }
    return out;
}

double lag1_autocorr(std::span<const double> series) {
    if (series.size() < 3) {
        throw NumericError("lag-1 autocorrelation needs at least 3 values, got " +
                           std::to_string(series.size()));
    }
    return pearson_pairs(series.first(series.size() - 1), series.subspan(1));
}

SummaryRow summary_stats(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 3) {
        throw NumericError("summary statistics need at least 3 values, got " +
                           std::to_string(n));
    }
    SummaryRow row;
    row.min = *std::min_element(series.begin(), series.end());
    row.max = *std::max_element(series.begin(), series.end());
    row.mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : series) {
        const double d = v - row.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 <= 0.0) {
        throw NumericError("zero variance: higher moments undefined");
    }
    row.variance = m2;
    row.skewness = m3 / std::pow(m2, 1.5);
    row.kurtosis = m4 / (m2 * m2);

    std::vector<double> diff(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) diff[i] = series[i + 1] - series[i];
    std::vector<double> sq(diff.size());
    for (std::size_t i = 0; i < diff.size(); ++i) sq[i] = diff[i] * diff[i];
    row.ac1 = lag1_autocorr(diff);
    row.ac2_1 = lag1_autocorr(sq);
    return row;
}

void write_summary_csv(std::ostream& out, const YieldPanel& panel,
                       const std::vector<SummaryRow>& rows) {
    out << "name,min,max,mean,variance,skewness,kurtosis,ac1,ac2_1\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SummaryRow& r = rows[i];
        out << panel.names[i] << ',' << fmt_g(r.min) << ',' << fmt_g(r.max) << ','
            << fmt_g(r.mean) << ',' << fmt_g(r.variance) << ',' << fmt_g(r.skewness) << ','
            << fmt_g(r.kurtosis) << ',' << fmt_g(r.ac1) << ',' << fmt_g(r.ac2_1) << '\n';
    }
}

}  // namespace corrnet::ingest
