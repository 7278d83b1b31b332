#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "corrnet/errors.hpp"
#include "corrnet/filter.hpp"

namespace corrnet::ergm {

enum class CovidScale { Percent, Fraction };

struct NodeAttributes {
    std::vector<std::string> names;
    std::vector<double> giips;
    std::vector<double> abfn;
    std::vector<double> euro;
    std::vector<double> covid_deaths;
    std::vector<double> debt_to_gdp;
    std::vector<double> inflation;
    std::vector<double> account_balance;

    int size() const { return static_cast<int>(names.size()); }
    const std::vector<double>& column(const std::string& attr) const;
    // Rows reordered to match a network's node order; every network node
    // must have an attribute row.
    NodeAttributes aligned_to(const std::vector<std::string>& order) const;
};

// CSV columns: name,giips,abfn,euro,covid_deaths,debt_to_gdp,inflation,
// account_balance. Flags must be 0/1 and GIIPS/ABFN are mutually
// exclusive. `scale` controls whether covid_deaths is kept as printed
// (percent) or divided by 100 (fraction).
NodeAttributes load_attributes(const std::string& path, CovidScale scale = CovidScale::Percent);

enum class TermKind { Edges, NodeFactor, NodeCov };

struct Term {
    TermKind kind = TermKind::Edges;
    std::string attr;

    std::string label() const;
};

struct ErgmSpec {
    std::vector<Term> terms;

    int size() const { return static_cast<int>(terms.size()); }
    void validate(const NodeAttributes& attrs) const;

    // edges + the three group factors + the four economic covariates.
    static ErgmSpec standard();
    static ErgmSpec edges_only();
};

// Toggle gain of dyad (i, j): edges -> 1, node_factor(x) -> x_i + x_j,
// node_cov(c) -> c_i + c_j. `attrs` must already be in node order.
Eigen::VectorXd change_stats(const NodeAttributes& attrs, const ErgmSpec& spec, int i, int j);

// Sum of change_stats over present edges; the edges term counts |E|.
Eigen::VectorXd global_stats(const filter::FilteredNetwork& g, const NodeAttributes& attrs,
                             const ErgmSpec& spec);

// Bernoulli log-likelihood of the density-only model with e of the
// n(n-1)/2 dyads present.
double null_loglik(int n, int edge_count);

struct ErgmFit {
    std::vector<std::string> term_labels;
    Eigen::VectorXd theta;
    Eigen::VectorXd std_err;
    Eigen::VectorXd p_values;
    std::vector<std::string> stars;
    double ll_model = 0.0;
    double ll_null = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    double model_fit_pct = 0.0;
    bool converged = false;
    int iterations = 0;
    int dyads = 0;
    int edge_count = 0;
};

struct Diagnostics {
    double aic = 0.0;
    double bic = 0.0;
    double model_fit_pct = 0.0;
};

Diagnostics diagnostics(double ll_model, double ll_null, int n_params, int dyads);

// Maximum pseudolikelihood via iteratively reweighted least squares;
// exact MLE for these dyad-independent statistics. Divergence past the
// iteration cap leaves converged = false with coefficients as reached.
ErgmFit fit_mple(const filter::FilteredNetwork& g, const NodeAttributes& attrs,
                 const ErgmSpec& spec, double ridge = 0.0);

struct SimulationResult {
    std::vector<std::vector<std::pair<int, int>>> networks;
    Eigen::MatrixXd stats;  // one row of global statistics per network
};

// Metropolis-Hastings dyad-toggle sampler from the empty graph;
// burn_in < 0 and thin < 0 select the defaults 10*D and D toggles.
SimulationResult simulate(const Eigen::VectorXd& theta, const NodeAttributes& attrs,
                          const ErgmSpec& spec, int n_networks, std::int64_t burn_in,
                          std::int64_t thin, std::uint64_t seed);

struct GofRow {
    std::string label;
    double observed = 0.0;
    double sim_mean = 0.0;
    double sim_sd = 0.0;
    double mc_se = 0.0;  // batch-means standard error of sim_mean
    double z = 0.0;
};

// Moment check at the fitted coefficients; refuses non-converged fits.
std::vector<GofRow> gof(const filter::FilteredNetwork& g, const NodeAttributes& attrs,
                        const ErgmSpec& spec, const ErgmFit& fit, int n_networks,
                        std::uint64_t seed);

nlohmann::json fit_report_json(const ErgmFit& fit);
void write_fit_text(std::ostream& out, const ErgmFit& fit);
nlohmann::json gof_to_json(const std::vector<GofRow>& rows);

}  // namespace corrnet::ergm
