#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "corrnet/errors.hpp"

namespace corrnet::ingest {

// Aligned multivariate yield series. `values` is T x n, one column per
// entity, every cell finite once loaded.
struct YieldPanel {
    std::vector<std::string> dates;  // strictly increasing ISO-8601
    std::vector<std::string> names;
    Eigen::MatrixXd values;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

struct WindowSpec {
    int length = 120;
    int displacement = 10;
};

// One sliding window, labeled by its last date.
struct Window {
    std::string start_date;
    std::string end_date;
    Eigen::MatrixXd values;  // length x n
};

struct SummaryRow {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;  // non-excess (normal -> 3)
    double ac1 = 0.0;       // lag-1 autocorrelation of first differences
    double ac2_1 = 0.0;     // lag-1 autocorrelation of squared first differences
};

// Loads a CSV with header `date,<name1>,<name2>,...`. Rows are sorted by
// date, rows where every entity cell is missing are dropped, and interior
// or trailing gaps of up to `gap_limit` consecutive missing cells are
// forward-filled. An entity missing at the start of the panel is rejected.
YieldPanel load_panel(const std::filesystem::path& path, int gap_limit = 5);

// Restricts a panel to dates in [from, to]; empty bounds are open.
YieldPanel slice_panel(const YieldPanel& panel, const std::string& from,
                       const std::string& to);

// Window k covers rows [k*displacement, k*displacement + length), emitted
// while the window fits entirely.
std::vector<Window> windows(const YieldPanel& panel, const WindowSpec& spec);

// Number of windows the sliding rule emits, without materializing them.
std::size_t window_count(std::size_t rows, const WindowSpec& spec);

// Pearson correlation between consecutive elements, corr(z_t, z_{t+1}).
// Exactly -1 for an alternating series, which the classical pooled-mean
// autocorrelation estimator does not reach.
double lag1_autocorr(std::span<const double> series);

// Moments use the 1/T population convention; skewness m3/m2^{3/2},
// kurtosis m4/m2^2 without the -3. Throws NumericError when the series or
// its differences are constant.
SummaryRow summary_stats(std::span<const double> series);

// `name,min,max,mean,variance,skewness,kurtosis,ac1,ac2_1`, one row per
// entity in panel order.
void write_summary_csv(std::ostream& out, const YieldPanel& panel,
                       const std::vector<SummaryRow>& rows);

}  // namespace corrnet::ingest
