#include "corrnet/ergm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "corrnet/io.hpp"

namespace corrnet::ergm {

namespace {

constexpr const char* kAttrsHeader =
    "name,giips,abfn,euro,covid_deaths,debt_to_gdp,inflation,account_balance";

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_number(const std::string& cell, const std::string& where) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("attributes: cannot parse number '" + cell + "' in " + where);
    return v;
}

double parse_flag(const std::string& cell, const std::string& where) {
    const double v = parse_number(cell, where);
    if (v != 0.0 && v != 1.0) throw DataError("attributes: flag must be 0 or 1 in " + where);
    return v;
}

double logistic(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double softplus(double eta) {
    return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

struct DyadDesign {
    std::vector<std::pair<int, int>> dyads;  // (i, j), i < j, lexicographic
    Eigen::MatrixXd x;                       // D x p change statistics
};

DyadDesign build_design(const NodeAttributes& attrs, const ErgmSpec& spec) {
    const int n = attrs.size();
    const int dyad_count = n * (n - 1) / 2;
    DyadDesign d;
    d.dyads.reserve(static_cast<size_t>(dyad_count));
    d.x.resize(dyad_count, spec.size());
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            d.dyads.emplace_back(i, j);
            d.x.row(k++) = change_stats(attrs, spec, i, j).transpose();
        }
    return d;
}

double bernoulli_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    double ll = 0.0;
    for (Eigen::Index k = 0; k < y.size(); ++k) ll += y(k) * eta(k) - softplus(eta(k));
    return ll;
}

std::string star_code(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

}  // namespace

const std::vector<double>& NodeAttributes::column(const std::string& attr) const {
    if (attr == "giips") return giips;
    if (attr == "abfn") return abfn;
    if (attr == "euro") return euro;
    if (attr == "covid_deaths") return covid_deaths;
    if (attr == "debt_to_gdp") return debt_to_gdp;
    if (attr == "inflation") return inflation;
    if (attr == "account_balance") return account_balance;
    throw SpecError("unknown attribute: " + attr);
}

NodeAttributes NodeAttributes::aligned_to(const std::vector<std::string>& order) const {
    NodeAttributes out;
    for (const auto& name : order) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw DataError("no attribute row for " + name);
        const auto k = static_cast<size_t>(it - names.begin());
        out.names.push_back(name);
        out.giips.push_back(giips[k]);
        out.abfn.push_back(abfn[k]);
        out.euro.push_back(euro[k]);
        out.covid_deaths.push_back(covid_deaths[k]);
        out.debt_to_gdp.push_back(debt_to_gdp[k]);
        out.inflation.push_back(inflation[k]);
        out.account_balance.push_back(account_balance[k]);
    }
    return out;
}

NodeAttributes load_attributes(const std::string& path, CovidScale scale) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open attributes file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError("attributes: empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kAttrsHeader)
        throw ParseError("attributes: expected header '" + std::string(kAttrsHeader) + "', got '" +
                         line + "'");

    NodeAttributes attrs;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != 8)
            throw ParseError("attributes: row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " cells, expected 8");
        const std::string& name = cells[0];
        if (name.empty()) throw ParseError("attributes: empty name in row " + std::to_string(row));
        if (std::find(attrs.names.begin(), attrs.names.end(), name) != attrs.names.end())
            throw DataError("attributes: duplicate row for " + name);
        const std::string where = "row for " + name;
        const double giips = parse_flag(cells[1], where);
        const double abfn = parse_flag(cells[2], where);
        if (giips == 1.0 && abfn == 1.0)
            throw DataError("attributes: " + name + " flagged both GIIPS and ABFN");
        attrs.names.push_back(name);
        attrs.giips.push_back(giips);
        attrs.abfn.push_back(abfn);
        attrs.euro.push_back(parse_flag(cells[3], where));
        const double covid = parse_number(cells[4], where);
        attrs.covid_deaths.push_back(scale == CovidScale::Fraction ? covid / 100.0 : covid);
        attrs.debt_to_gdp.push_back(parse_number(cells[5], where));
        attrs.inflation.push_back(parse_number(cells[6], where));
        attrs.account_balance.push_back(parse_number(cells[7], where));
    }
    if (attrs.names.empty()) throw DataError("attributes: no data rows in " + path);
    return attrs;
}

std::string Term::label() const {
    switch (kind) {
        case TermKind::Edges: return "edges";
        case TermKind::NodeFactor: return "node_factor(" + attr + ")";
        case TermKind::NodeCov: return "node_cov(" + attr + ")";
    }
    throw SpecError("unknown term kind");
}

void ErgmSpec::validate(const NodeAttributes& attrs) const {
    if (terms.empty()) throw SpecError("model spec has no terms");
    int edges_terms = 0;
    for (const auto& t : terms) {
        if (t.kind == TermKind::Edges) {
            ++edges_terms;
        } else {
            attrs.column(t.attr);  // throws on unknown attribute
        }
    }
    if (edges_terms != 1)
        throw SpecError("model spec must contain the edges term exactly once, found " +
                        std::to_string(edges_terms));
}

ErgmSpec ErgmSpec::standard() {
    ErgmSpec s;
    s.terms = {{TermKind::Edges, ""},
               {TermKind::NodeFactor, "giips"},
               {TermKind::NodeFactor, "abfn"},
               {TermKind::NodeFactor, "euro"},
               {TermKind::NodeCov, "covid_deaths"},
               {TermKind::NodeCov, "debt_to_gdp"},
               {TermKind::NodeCov, "inflation"},
               {TermKind::NodeCov, "account_balance"}};
    return s;
}

ErgmSpec ErgmSpec::edges_only() {
    ErgmSpec s;
    s.terms = {{TermKind::Edges, ""}};
    return s;
}

Eigen::VectorXd change_stats(const NodeAttributes& attrs, const ErgmSpec& spec, int i, int j) {
    if (i < 0 || j <= i || j >= attrs.size())
        throw DataError("change_stats: dyad indices must satisfy 0 <= i < j < n");
    Eigen::VectorXd z(spec.size());
    for (int t = 0; t < spec.size(); ++t) {
        const auto& term = spec.terms[static_cast<size_t>(t)];
        if (term.kind == TermKind::Edges) {
            z(t) = 1.0;
        } else {
            const auto& col = attrs.column(term.attr);
            z(t) = col[static_cast<size_t>(i)] + col[static_cast<size_t>(j)];
        }
    }
    return z;
}

Eigen::VectorXd global_stats(const filter::FilteredNetwork& g, const NodeAttributes& attrs,
                             const ErgmSpec& spec) {
    const NodeAttributes al = attrs.aligned_to(g.names);
    spec.validate(al);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(spec.size());
    for (const auto& e : g.edges) z += change_stats(al, spec, e.i, e.j);
    return z;
}

double null_loglik(int n, int edge_count) {
    const int dyads = n * (n - 1) / 2;
    if (edge_count <= 0 || edge_count >= dyads)
        throw DataError("null log-likelihood needs at least one present and one absent dyad");
    const double p = static_cast<double>(edge_count) / static_cast<double>(dyads);
    return edge_count * std::log(p) + (dyads - edge_count) * std::log1p(-p);
}

Diagnostics diagnostics(double ll_model, double ll_null, int n_params, int dyads) {
    if (ll_null == 0.0) throw NumericError("model fit undefined: null log-likelihood is zero");
    Diagnostics d;
    d.aic = 2.0 * n_params - 2.0 * ll_model;
    d.bic = n_params * std::log(static_cast<double>(dyads)) - 2.0 * ll_model;
    d.model_fit_pct = 100.0 * (1.0 - ll_model / ll_null);
    return d;
}

ErgmFit fit_mple(const filter::FilteredNetwork& g, const NodeAttributes& attrs,
                 const ErgmSpec& spec, double ridge) {
    if (ridge < 0.0) throw DataError("ridge penalty must be nonnegative");
    const NodeAttributes al = attrs.aligned_to(g.names);
    spec.validate(al);
    const int n = g.size();
    if (n < 2) throw DataError("ERGM fit needs at least 2 nodes");
    const int p = spec.size();

    const DyadDesign design = build_design(al, spec);
    const auto dyad_count = static_cast<Eigen::Index>(design.dyads.size());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dyad_count);
    {
        std::vector<std::vector<bool>> present(static_cast<size_t>(n),
                                               std::vector<bool>(static_cast<size_t>(n), false));
        for (const auto& e : g.edges) present[static_cast<size_t>(e.i)][static_cast<size_t>(e.j)] = true;
        for (Eigen::Index k = 0; k < dyad_count; ++k) {
            const auto [i, j] = design.dyads[static_cast<size_t>(k)];
            if (present[static_cast<size_t>(i)][static_cast<size_t>(j)]) y(k) = 1.0;
        }
    }
    const int edge_count = static_cast<int>(y.sum());
    if (edge_count == 0 || edge_count == dyad_count)
        throw DataError("MPLE needs at least one present and one absent dyad");

    constexpr int kMaxIter = 100;
    constexpr double kStepTol = 1e-10;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd mu(dyad_count), w(dyad_count);
    bool converged = false;
    int iterations = 0;
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        iterations = iter;
        const Eigen::VectorXd eta = design.x * theta;
        for (Eigen::Index k = 0; k < dyad_count; ++k) {
            mu(k) = logistic(eta(k));
            w(k) = mu(k) * (1.0 - mu(k));
        }
        const Eigen::VectorXd grad = design.x.transpose() * (y - mu) - ridge * theta;
        Eigen::MatrixXd info = design.x.transpose() * w.asDiagonal() * design.x;
        info.diagonal().array() += ridge;
        const Eigen::VectorXd delta = info.ldlt().solve(grad);
        if (!delta.allFinite()) break;
        theta += delta;
        if (delta.lpNorm<Eigen::Infinity>() < kStepTol) {
            converged = true;
            break;
        }
    }

    ErgmFit fit;
    for (const auto& t : spec.terms) fit.term_labels.push_back(t.label());
    fit.theta = theta;
    fit.converged = converged;
    fit.iterations = iterations;
    fit.dyads = static_cast<int>(dyad_count);
    fit.edge_count = edge_count;

    const Eigen::VectorXd eta = design.x * theta;
    for (Eigen::Index k = 0; k < dyad_count; ++k) {
        mu(k) = logistic(eta(k));
        w(k) = mu(k) * (1.0 - mu(k));
    }
    // Log-odds beyond 25 pin fitted probabilities at 0/1 (separation), which
    // the step criterion alone cannot tell apart from convergence.
    if (eta.lpNorm<Eigen::Infinity>() > 25.0) fit.converged = false;
    fit.ll_model = bernoulli_loglik(y, eta);
    fit.ll_null = null_loglik(n, edge_count);

    Eigen::MatrixXd info = design.x.transpose() * w.asDiagonal() * design.x;
    info.diagonal().array() += ridge;
    const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    fit.std_err.resize(p);
    fit.p_values.resize(p);
    for (int k = 0; k < p; ++k) {
        fit.std_err(k) = std::sqrt(cov(k, k));
        const double z = theta(k) / fit.std_err(k);
        fit.p_values(k) = std::erfc(std::abs(z) / std::sqrt(2.0));
        fit.stars.push_back(star_code(fit.p_values(k)));
    }

    const Diagnostics d = diagnostics(fit.ll_model, fit.ll_null, p, fit.dyads);
    fit.aic = d.aic;
    fit.bic = d.bic;
    fit.model_fit_pct = d.model_fit_pct;
    return fit;
}

SimulationResult simulate(const Eigen::VectorXd& theta, const NodeAttributes& attrs,
                          const ErgmSpec& spec, int n_networks, std::int64_t burn_in,
                          std::int64_t thin, std::uint64_t seed) {
    spec.validate(attrs);
    const int n = attrs.size();
    if (n < 2) throw DataError("simulate needs at least 2 nodes");
    if (theta.size() != spec.size())
        throw DataError("simulate: coefficient count does not match model spec");
    if (n_networks < 1) throw DataError("simulate needs n_networks >= 1");

    const DyadDesign design = build_design(attrs, spec);
    const auto dyad_count = static_cast<std::uint64_t>(design.dyads.size());
    if (burn_in < 0) burn_in = 10 * static_cast<std::int64_t>(dyad_count);
    if (thin < 0) thin = static_cast<std::int64_t>(dyad_count);
    if (thin < 1) throw DataError("simulate needs thin >= 1");

    std::mt19937_64 rng(seed);
    std::vector<bool> present(dyad_count, false);
    Eigen::VectorXd stats = Eigen::VectorXd::Zero(spec.size());

    auto toggle = [&] {
        const auto k = static_cast<size_t>(uniform_below(rng, dyad_count));
        const double sign = present[k] ? -1.0 : 1.0;
        const double logp = sign * theta.dot(design.x.row(static_cast<Eigen::Index>(k)));
        if (logp >= 0.0 || uniform_unit(rng) < std::exp(logp)) {
            present[k] = !present[k];
            stats += sign * design.x.row(static_cast<Eigen::Index>(k)).transpose();
        }
    };

    SimulationResult result;
    result.networks.reserve(static_cast<size_t>(n_networks));
    result.stats.resize(n_networks, spec.size());
    for (std::int64_t t = 0; t < burn_in; ++t) toggle();
    for (int s = 0; s < n_networks; ++s) {
        for (std::int64_t t = 0; t < thin; ++t) toggle();
        std::vector<std::pair<int, int>> edges;
        for (size_t k = 0; k < dyad_count; ++k)
            if (present[k]) edges.push_back(design.dyads[k]);
        result.networks.push_back(std::move(edges));
        result.stats.row(s) = stats.transpose();
    }
    return result;
}

std::vector<GofRow> gof(const filter::FilteredNetwork& g, const NodeAttributes& attrs,
                        const ErgmSpec& spec, const ErgmFit& fit, int n_networks,
                        std::uint64_t seed) {
    if (!fit.converged)
        throw ConvergenceError("goodness of fit requires a converged fit; refit with a ridge "
                               "penalty or a smaller model");
    const NodeAttributes al = attrs.aligned_to(g.names);
    const Eigen::VectorXd observed = global_stats(g, al, spec);
    const SimulationResult sim = simulate(fit.theta, al, spec, n_networks, -1, -1, seed);

    const auto m = static_cast<int>(sim.stats.rows());
    const int batches = std::clamp(static_cast<int>(std::floor(std::sqrt(m))), 2, 100);
    const int batch_len = m / batches;

    std::vector<GofRow> rows;
    for (int t = 0; t < spec.size(); ++t) {
        GofRow row;
        row.label = spec.terms[static_cast<size_t>(t)].label();
        row.observed = observed(t);
        const Eigen::VectorXd col = sim.stats.col(t);
        row.sim_mean = col.mean();
        row.sim_sd = std::sqrt((col.array() - row.sim_mean).square().sum() / m);

        // Batch means absorb the autocorrelation of the sampler chain that
        // a naive sd/sqrt(m) would ignore.
        Eigen::VectorXd bmeans(batches);
        for (int b = 0; b < batches; ++b)
            bmeans(b) = col.segment(static_cast<Eigen::Index>(b) * batch_len, batch_len).mean();
        const double bmean = bmeans.mean();
        const double bvar = (bmeans.array() - bmean).square().sum() / (batches - 1);
        row.mc_se = std::sqrt(bvar / batches);
        if (row.mc_se == 0.0) {
            row.z = row.sim_mean == row.observed
                        ? 0.0
                        : std::copysign(std::numeric_limits<double>::infinity(),
                                        row.sim_mean - row.observed);
        } else {
            row.z = (row.sim_mean - row.observed) / row.mc_se;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json fit_report_json(const ErgmFit& fit) {
    nlohmann::json j;
    j["spec"] = fit.term_labels;
    j["theta"] = std::vector<double>(fit.theta.data(), fit.theta.data() + fit.theta.size());
    j["std_err"] =
        std::vector<double>(fit.std_err.data(), fit.std_err.data() + fit.std_err.size());
    j["p_values"] =
        std::vector<double>(fit.p_values.data(), fit.p_values.data() + fit.p_values.size());
    j["stars"] = fit.stars;
    j["ll_model"] = fit.ll_model;
    j["ll_null"] = fit.ll_null;
    j["aic"] = fit.aic;
    j["bic"] = fit.bic;
    j["model_fit_pct"] = fit.model_fit_pct;
    j["converged"] = fit.converged;
    return j;
}

void write_fit_text(std::ostream& out, const ErgmFit& fit) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-28s %14s %12s %10s\n", "term", "estimate", "std.err", "p");
    out << buf;
    for (size_t k = 0; k < fit.term_labels.size(); ++k) {
        const auto ki = static_cast<Eigen::Index>(k);
        std::snprintf(buf, sizeof(buf), "%-28s %14s %12s %10s %s\n", fit.term_labels[k].c_str(),
                      fmt_g(fit.theta(ki), 6).c_str(), fmt_g(fit.std_err(ki), 6).c_str(),
                      fmt_g(fit.p_values(ki), 3).c_str(), fit.stars[k].c_str());
        out << buf;
    }
    out << '\n';
    out << "Log likelihood (model)  " << fmt_g(fit.ll_model, 6) << '\n';
    out << "Log likelihood (null)   " << fmt_g(fit.ll_null, 6) << '\n';
    out << "AIC                     " << fmt_g(fit.aic, 6) << '\n';
    out << "BIC                     " << fmt_g(fit.bic, 6) << '\n';
    out << "Model fit               " << fmt_f(fit.model_fit_pct, 2) << "%\n";
    out << "Dyads                   " << fit.dyads << '\n';
    out << "Edges                   " << fit.edge_count << '\n';
    out << "Converged               " << (fit.converged ? "yes" : "no") << '\n';
}

nlohmann::json gof_to_json(const std::vector<GofRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"statistic", r.label},
                       {"observed", r.observed},
                       {"sim_mean", r.sim_mean},
                       {"sim_sd", r.sim_sd},
                       {"mc_se", r.mc_se},
                       {"z", r.z}});
    }
    return arr;
}

}  // namespace corrnet::ergm
