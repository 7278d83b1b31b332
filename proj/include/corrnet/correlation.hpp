#pragma once

#include <Eigen/Dense>

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrnet/errors.hpp"

namespace corrnet::correlation {

enum class Kind { Plain, Conditional };

std::string kind_name(Kind kind);
Kind parse_kind(const std::string& name);

// Symmetric, unit diagonal, entries in [-1, 1].
struct CorrelationMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd r;
    Kind kind = Kind::Plain;

    Eigen::Index size() const { return r.rows(); }
};

// Symmetric, zero diagonal, entries in [0, 2].
struct DistanceMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd d;

    Eigen::Index size() const { return d.rows(); }
};

// Row partition of one entity's window: `high` holds the 25% lowest plus
// 25% highest values (ceil(T/4) low, floor(T/4) high, ties to the earlier
// row), `low` the middle half.
struct SubgroupSplit {
    std::vector<int> high_idx;
    std::vector<int> low_idx;
};

SubgroupSplit subgroup_split(std::span<const double> series);

// Sample-mean Pearson coefficient. Rounding overshoot beyond +-1 is
// clamped silently below 1e-9 and rejected above.
double pearson(std::span<const double> x, std::span<const double> y);

// r * sqrt((1 + beta) / (1 + beta r^2)); identity at beta = 0.
double adjusted_correlation(double r, double beta);

// Volatility-adjusted coefficient: splits each series into extreme/middle
// subgroups, symmetrizes the subgroup covariances across the pair, and
// amplifies by beta = max(sigma_h / sigma_l - 1, 0).
double conditional_pearson(std::span<const double> x, std::span<const double> y);

// Pairwise application of the chosen estimator over window columns; each
// pair is computed once so symmetry is exact.
CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& window,
                                     const std::vector<std::string>& names, Kind kind);

// d = sqrt(2 (1 - r)); maps r = 1 -> 0 and r = -1 -> 2.
DistanceMatrix to_distance(const CorrelationMatrix& c);

// Mean of the n(n-1)/2 upper-triangle entries.
double mean_correlation(const CorrelationMatrix& c);

// Population variance of the upper-triangle entries about the mean.
double corr_variance(const CorrelationMatrix& c);

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& names,
                      const Eigen::MatrixXd& m);

nlohmann::json correlation_to_json(const CorrelationMatrix& c);
nlohmann::json distance_to_json(const DistanceMatrix& d);

}  // namespace corrnet::correlation
