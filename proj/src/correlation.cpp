#include "corrnet/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corrnet/io.hpp"

namespace corrnet::correlation {

namespace {

constexpr double kClampSlack = 1e-9;

double clamp_unit(double r, const char* what) {
    if (r > 1.0) {
        if (r - 1.0 > kClampSlack)
            throw NumericError(std::string(what) + " overshoots 1 beyond rounding slack");
        return 1.0;
    }
    if (r < -1.0) {
        if (-1.0 - r > kClampSlack)
            throw NumericError(std::string(what) + " overshoots -1 beyond rounding slack");
        return -1.0;
    }
    return r;
}

double mean_over(std::span<const double> v, const std::vector<int>& idx) {
    double s = 0.0;
    for (int t : idx) s += v[static_cast<size_t>(t)];
    return s / static_cast<double>(idx.size());
}

// Population covariance of (x, y) restricted to the rows in idx.
double subset_cov(std::span<const double> x, std::span<const double> y,
                  const std::vector<int>& idx) {
    const double mx = mean_over(x, idx);
    const double my = mean_over(y, idx);
    double s = 0.0;
    for (int t : idx) {
        auto u = static_cast<size_t>(t);
        s += (x[u] - mx) * (y[u] - my);
    }
    return s / static_cast<double>(idx.size());
}

double conditional_from_splits(std::span<const double> x, std::span<const double> y,
                               const SubgroupSplit& sx, const SubgroupSplit& sy) {
    const double r = pearson(x, y);
    const double sigma_h = 0.5 * (subset_cov(x, y, sx.high_idx) + subset_cov(x, y, sy.high_idx));
    const double sigma_l = 0.5 * (subset_cov(x, y, sx.low_idx) + subset_cov(x, y, sy.low_idx));
    if (sigma_l == 0.0)
        throw NumericError("degenerate subgroup: zero covariance over the middle half");
    const double beta = std::max(sigma_h / sigma_l - 1.0, 0.0);
    return clamp_unit(adjusted_correlation(r, beta), "conditional correlation");
}

}  // namespace

std::string kind_name(Kind kind) {
    return kind == Kind::Plain ? "plain" : "conditional";
}

Kind parse_kind(const std::string& name) {
    if (name == "plain") return Kind::Plain;
    if (name == "conditional") return Kind::Conditional;
    throw SpecError("unknown correlation kind: " + name);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("pearson: length mismatch");
    if (x.size() < 2) throw DataError("pearson: need at least 2 observations");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t t = 0; t < x.size(); ++t) {
        mx += x[t];
        my += y[t];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t t = 0; t < x.size(); ++t) {
        const double dx = x[t] - mx;
        const double dy = y[t] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw NumericError("pearson: zero variance input");
    return clamp_unit(sxy / std::sqrt(sxx * syy), "pearson correlation");
}

SubgroupSplit subgroup_split(std::span<const double> series) {
    const auto n = static_cast<int>(series.size());
    if (n < 4) throw DataError("subgroup_split: need at least 4 observations");
    const int n_low = (n + 3) / 4;   // ceil(n/4) lowest values
    const int n_high = n / 4;        // floor(n/4) highest values

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        auto ua = static_cast<size_t>(a), ub = static_cast<size_t>(b);
        if (series[ua] != series[ub]) return series[ua] < series[ub];
        return a < b;
    });

    SubgroupSplit split;
    split.high_idx.assign(order.begin(), order.begin() + n_low);

    // Highest values, ties resolved toward the earlier row.
    std::vector<int> rest(order.begin() + n_low, order.end());
    std::sort(rest.begin(), rest.end(), [&](int a, int b) {
        auto ua = static_cast<size_t>(a), ub = static_cast<size_t>(b);
        if (series[ua] != series[ub]) return series[ua] > series[ub];
        return a < b;
    });
    split.high_idx.insert(split.high_idx.end(), rest.begin(), rest.begin() + n_high);
    split.low_idx.assign(rest.begin() + n_high, rest.end());

    std::sort(split.high_idx.begin(), split.high_idx.end());
    std::sort(split.low_idx.begin(), split.low_idx.end());
    return split;
}

double adjusted_correlation(double r, double beta) {
    return r * std::sqrt((1.0 + beta) / (1.0 + beta * r * r));
}

double conditional_pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("conditional_pearson: length mismatch");
    const SubgroupSplit sx = subgroup_split(x);
    const SubgroupSplit sy = subgroup_split(y);
    if (sx.low_idx.size() < 2 || sx.high_idx.size() < 2)
        throw DataError("conditional_pearson: subgroups need at least 2 rows each");
    return conditional_from_splits(x, y, sx, sy);
}

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& window,
                                     const std::vector<std::string>& names, Kind kind) {
    const auto n = window.cols();
    if (static_cast<Eigen::Index>(names.size()) != n)
        throw DataError("correlation_matrix: name count does not match columns");
    if (n < 2) throw DataError("correlation_matrix: need at least 2 entities");

    std::vector<std::vector<double>> cols(static_cast<size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        cols[static_cast<size_t>(j)].assign(window.col(j).data(),
                                            window.col(j).data() + window.rows());
        const auto& c = cols[static_cast<size_t>(j)];
        if (std::all_of(c.begin(), c.end(), [&](double v) { return v == c.front(); }))
            throw NumericError("constant series for " + names[static_cast<size_t>(j)]);
    }

    std::vector<SubgroupSplit> splits;
    if (kind == Kind::Conditional) {
        splits.reserve(static_cast<size_t>(n));
        for (Eigen::Index j = 0; j < n; ++j)
            splits.push_back(subgroup_split(cols[static_cast<size_t>(j)]));
    }

    CorrelationMatrix out;
    out.names = names;
    out.kind = kind;
    out.r = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& x = cols[static_cast<size_t>(i)];
            const auto& y = cols[static_cast<size_t>(j)];
            double r;
            if (kind == Kind::Plain) {
                r = pearson(x, y);
            } else {
                r = conditional_from_splits(x, y, splits[static_cast<size_t>(i)],
                                            splits[static_cast<size_t>(j)]);
            }
            out.r(i, j) = r;
            out.r(j, i) = r;
        }
    }
    return out;
}

DistanceMatrix to_distance(const CorrelationMatrix& c) {
    DistanceMatrix out;
    out.names = c.names;
    out.d = (2.0 * (1.0 - c.r.array())).sqrt().matrix();
    out.d.diagonal().setZero();
    return out;
}

double mean_correlation(const CorrelationMatrix& c) {
    const auto n = c.size();
    if (n < 2) throw DataError("mean_correlation: need at least 2 entities");
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) s += c.r(i, j);
    return s / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double corr_variance(const CorrelationMatrix& c) {
    const auto n = c.size();
    if (n < 2) throw DataError("corr_variance: need at least 2 entities");
    const double mean = mean_correlation(c);
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dev = c.r(i, j) - mean;
            s += dev * dev;
        }
    return s / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& names,
                      const Eigen::MatrixXd& m) {
    out << "name";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << names[static_cast<size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << fmt_g(m(i, j));
        out << '\n';
    }
}

namespace {

nlohmann::json rows_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::json correlation_to_json(const CorrelationMatrix& c) {
    return {{"names", c.names}, {"kind", kind_name(c.kind)}, {"rows", rows_to_json(c.r)}};
}

nlohmann::json distance_to_json(const DistanceMatrix& d) {
    return {{"names", d.names}, {"kind", "distance"}, {"rows", rows_to_json(d.d)}};
}

}  // namespace corrnet::correlation
