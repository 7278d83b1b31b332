#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrnet/correlation.hpp"
#include "corrnet/ergm.hpp"
#include "corrnet/errors.hpp"
#include "corrnet/filter.hpp"
#include "corrnet/ingest.hpp"
#include "corrnet/io.hpp"
#include "corrnet/netmetrics.hpp"

namespace fs = std::filesystem;
using namespace corrnet;

namespace {

constexpr const char* kVersion = "0.1.0";

// Flag misuse that CLI11 cannot catch on its own (bad method token,
// missing --attrs); mapped to exit code 1 like any other usage error.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string input;
    std::string attrs;
    std::string from;
    std::string to;
    std::string out = ".";
    int window = 120;
    int step = 10;
    std::string corr = "conditional";
    std::string methods = "mst,mast,ag,tmfg";
    std::string window_end;  // empty = most recent window
    std::string method = "mst";
    std::string covid_scale = "percent";
    std::uint64_t seed = 1;
    double ridge = 0.0;
    int nsim = 10000;
    bool edges_only = false;
};

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Input files enter the digest by content, not by path: the same analysis
// on the same data must hash identically however the files are addressed.
std::string file_fingerprint(const std::string& path) {
    if (path.empty()) return "none";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    const std::string bytes{std::istreambuf_iterator<char>(in),
                            std::istreambuf_iterator<char>()};
    return hex64(fnv1a(bytes));
}

// Output directory is deliberately excluded: moving results elsewhere must
// not change their bytes.
std::string config_digest(const std::string& cmd, const RunConfig& c) {
    std::ostringstream s;
    s << cmd << "|input=" << file_fingerprint(c.input) << "|attrs="
      << file_fingerprint(c.attrs) << "|window=" << c.window
      << "|step=" << c.step << "|corr=" << c.corr << "|methods=" << c.methods
      << "|from=" << c.from << "|to=" << c.to << "|seed=" << c.seed
      << "|covid=" << c.covid_scale << "|ridge=" << fmt_g(c.ridge) << "|nsim=" << c.nsim
      << "|window_end=" << c.window_end << "|method=" << c.method
      << "|edges_only=" << (c.edges_only ? 1 : 0);
    return hex64(fnv1a(s.str()));
}

std::string provenance_line(const std::string& cmd, const std::string& digest) {
    return "# corrnet " + cmd + " config=" + digest + " version=" + kVersion + "\n";
}

nlohmann::json provenance_json(const std::string& cmd, const std::string& digest) {
    return {{"command", "corrnet " + cmd}, {"config", digest}, {"version", kVersion}};
}

void atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << content;
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

fs::path prepare_out_dir(const RunConfig& c) {
    const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    fs::create_directories(dir);
    return dir;
}

ingest::YieldPanel load_input(const RunConfig& c) {
    const auto panel = ingest::load_panel(c.input);
    return ingest::slice_panel(panel, c.from, c.to);
}

std::vector<filter::Method> parse_methods(const std::string& flag) {
    std::vector<filter::Method> out;
    std::stringstream ss(flag);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw UsageError("--methods has an empty entry");
        filter::Method m;
        try {
            m = filter::parse_method(tok);
        } catch (const SpecError& e) {
            throw UsageError(e.what());
        }
        if (std::find(out.begin(), out.end(), m) != out.end())
            throw UsageError("--methods lists " + tok + " twice");
        out.push_back(m);
    }
    if (out.empty()) throw UsageError("--methods must name at least one method");
    return out;
}

filter::FilteredNetwork run_filter(filter::Method m, const correlation::DistanceMatrix& dist) {
    switch (m) {
        case filter::Method::MST: return filter::mst(dist);
        case filter::Method::MaST: return filter::mast(dist);
        case filter::Method::AG: return filter::asset_graph(dist);
        case filter::Method::TMFG: return filter::tmfg(dist);
    }
    throw SpecError("unknown method enum value");
}

const ingest::Window& select_window(const std::vector<ingest::Window>& ws,
                                    const std::string& requested) {
    if (requested.empty()) return ws.back();
    for (const auto& w : ws)
        if (w.end_date == requested) return w;
    std::string msg = "no window ends on " + requested + "; available window ends:";
    for (const auto& w : ws) msg += ' ' + w.end_date;
    throw DataError(msg);
}

nlohmann::json stats_json(const filter::FilteredNetwork& g, const netmetrics::NetworkStats& st) {
    nlohmann::json j;
    j["edge_count"] = static_cast<int>(g.edges.size());
    j["length"] = st.length;
    j["length_var"] = st.length_var;
    j["max_degree"] = st.max_degree;
    j["max_degree_node"] = st.max_degree_node;
    j["central"] = st.central;
    j["mol"] = st.mol;
    j["betweenness"] = st.betweenness;
    return j;
}

int run_summary(const RunConfig& cfg) {
    const auto dir = prepare_out_dir(cfg);
    const auto panel = load_input(cfg);
    std::vector<ingest::SummaryRow> rows;
    rows.reserve(static_cast<size_t>(panel.cols()));
    for (Eigen::Index j = 0; j < panel.cols(); ++j) {
        const std::span<const double> col(panel.values.col(j).data(),
                                          static_cast<size_t>(panel.rows()));
        try {
            rows.push_back(ingest::summary_stats(col));
        } catch (const Error& e) {
            throw DataError(panel.names[static_cast<size_t>(j)] + ": " + e.what());
        }
    }
    std::ostringstream body;
    body << provenance_line("summary", config_digest("summary", cfg));
    ingest::write_summary_csv(body, panel, rows);
    atomic_write(dir / "summary.csv", body.str());
    return 0;
}

int run_rolling(const RunConfig& cfg) {
    const auto dir = prepare_out_dir(cfg);
    const auto panel = load_input(cfg);
    const auto methods = parse_methods(cfg.methods);
    const auto kind = correlation::parse_kind(cfg.corr);
    const ingest::WindowSpec wspec{cfg.window, cfg.step};
    const auto series = netmetrics::rolling_run(panel, wspec, kind, methods);
    std::ostringstream body;
    body << provenance_line("rolling", config_digest("rolling", cfg));
    netmetrics::write_rolling_csv(body, series);
    atomic_write(dir / "rolling.csv", body.str());
    return 0;
}

int run_network(const RunConfig& cfg) {
    const auto dir = prepare_out_dir(cfg);
    const auto panel = load_input(cfg);
    const auto methods = parse_methods(cfg.methods);
    const auto kind = correlation::parse_kind(cfg.corr);
    const ingest::WindowSpec wspec{cfg.window, cfg.step};
    const auto ws = ingest::windows(panel, wspec);
    const auto& win = select_window(ws, cfg.window_end);

    const auto corr = correlation::correlation_matrix(win.values, panel.names, kind);
    const auto dist = correlation::to_distance(corr);
    const auto digest = config_digest("network", cfg);

    nlohmann::json stats;
    stats["provenance"] = provenance_json("network", digest);
    stats["window_end"] = win.end_date;
    stats["window_start"] = win.start_date;
    stats["corr"] = correlation::kind_name(kind);
    stats["names"] = panel.names;
    stats["mean_corr"] = correlation::mean_correlation(corr);
    stats["corr_var"] = correlation::corr_variance(corr);
    stats["methods"] = nlohmann::json::object();

    for (const auto m : methods) {
        const auto g = run_filter(m, dist);
        const auto name = filter::method_name(m);

        std::ostringstream csv;
        csv << provenance_line("network", digest);
        filter::write_edge_header(csv);
        filter::write_edges_csv(csv, g, win.end_date);
        atomic_write(dir / ("network_" + name + "_" + win.end_date + ".csv"), csv.str());

        nlohmann::json edges = filter::edges_to_json(g, win.end_date);
        edges["provenance"] = provenance_json("network", digest);
        atomic_write(dir / ("network_" + name + "_" + win.end_date + ".json"),
                     edges.dump(2) + "\n");

        stats["methods"][name] = stats_json(g, netmetrics::compute_stats(g));
    }
    atomic_write(dir / ("network_stats_" + win.end_date + ".json"), stats.dump(2) + "\n");
    return 0;
}

int run_ergm(const RunConfig& cfg) {
    if (cfg.attrs.empty()) throw UsageError("ergm requires --attrs");
    const auto dir = prepare_out_dir(cfg);
    const auto panel = load_input(cfg);
    const auto kind = correlation::parse_kind(cfg.corr);
    filter::Method method;
    try {
        method = filter::parse_method(cfg.method);
    } catch (const SpecError& e) {
        throw UsageError(e.what());
    }
    const ingest::WindowSpec wspec{cfg.window, cfg.step};
    const auto ws = ingest::windows(panel, wspec);
    const auto& win = select_window(ws, cfg.window_end);

    const auto corr = correlation::correlation_matrix(win.values, panel.names, kind);
    const auto g = run_filter(method, correlation::to_distance(corr));

    const auto scale = cfg.covid_scale == "fraction" ? ergm::CovidScale::Fraction
                                                     : ergm::CovidScale::Percent;
    const auto attrs = ergm::load_attributes(cfg.attrs, scale);
    const auto spec = cfg.edges_only ? ergm::ErgmSpec::edges_only() : ergm::ErgmSpec::standard();
    const auto fit = ergm::fit_mple(g, attrs, spec, cfg.ridge);

    const auto digest = config_digest("ergm", cfg);
    nlohmann::json report = ergm::fit_report_json(fit);
    report["provenance"] = provenance_json("ergm", digest);
    report["method"] = filter::method_name(method);
    report["window_end"] = win.end_date;
    if (fit.converged && cfg.nsim > 0) {
        const auto rows = ergm::gof(g, attrs, spec, fit, cfg.nsim, cfg.seed);
        report["gof"] = ergm::gof_to_json(rows);
    }
    atomic_write(dir / ("ergm_" + filter::method_name(method) + "_" + win.end_date + ".json"),
                 report.dump(2) + "\n");

    std::cout << "ERGM fit: " << filter::method_name(method) << ", window ending " << win.end_date
              << "\n\n";
    ergm::write_fit_text(std::cout, fit);
    if (!fit.converged) {
        std::cerr << "warning: the fit did not converge; coefficients are reported "
                     "as reached (consider --ridge)\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlation-filtered networks from sovereign bond yields"};
    app.require_subcommand(1);
    RunConfig cfg;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "Yield panel CSV: date,<name1>,...")
            ->required();
        sub->add_option("--from", cfg.from, "Keep dates >= this ISO date");
        sub->add_option("--to", cfg.to, "Keep dates <= this ISO date");
        sub->add_option("--out", cfg.out, "Output directory (default .)")
            ->envname("CORRNET_OUT");
    };
    const auto add_windowing = [&](CLI::App* sub) {
        sub->add_option("--window", cfg.window, "Window length in rows")
            ->default_val(120)
            ->check(CLI::PositiveNumber);
        sub->add_option("--step", cfg.step, "Window displacement in rows")
            ->default_val(10)
            ->check(CLI::PositiveNumber);
        sub->add_option("--corr", cfg.corr, "Correlation estimator")
            ->default_val("conditional")
            ->check(CLI::IsMember({"plain", "conditional"}));
    };

    auto* summary = app.add_subcommand("summary", "Per-entity summary statistics");
    add_common(summary);

    auto* rolling = app.add_subcommand("rolling", "Rolling-window network statistics");
    add_common(rolling);
    add_windowing(rolling);
    rolling->add_option("--methods", cfg.methods, "Comma-separated filtering methods")
        ->default_val("mst,mast,ag,tmfg");

    auto* network = app.add_subcommand("network", "Edge lists and statistics for one window");
    add_common(network);
    add_windowing(network);
    network->add_option("--methods", cfg.methods, "Comma-separated filtering methods")
        ->default_val("mst,mast,ag,tmfg");
    network->add_option("--window-end", cfg.window_end,
                        "End date of the window (default: most recent)");

    auto* ergm_cmd = app.add_subcommand("ergm", "Fit an ERGM to one filtered network");
    add_common(ergm_cmd);
    add_windowing(ergm_cmd);
    ergm_cmd->add_option("--attrs", cfg.attrs, "Node attributes CSV");
    ergm_cmd->add_option("--window-end", cfg.window_end,
                         "End date of the window (default: most recent)");
    ergm_cmd->add_option("--method", cfg.method, "Filtering method to fit")
        ->default_val("mst");
    ergm_cmd->add_option("--covid-scale", cfg.covid_scale, "COVID deaths column scaling")
        ->default_val("percent")
        ->check(CLI::IsMember({"percent", "fraction"}));
    ergm_cmd->add_option("--ridge", cfg.ridge, "Ridge penalty for the fit")
        ->default_val(0.0)
        ->check(CLI::NonNegativeNumber);
    ergm_cmd->add_option("--seed", cfg.seed, "Simulation seed")->default_val(1);
    ergm_cmd->add_option("--nsim", cfg.nsim, "Simulated networks for goodness of fit (0 = skip)")
        ->default_val(10000)
        ->check(CLI::NonNegativeNumber);
    ergm_cmd->add_flag("--edges-only", cfg.edges_only, "Fit the density-only model");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (summary->parsed()) return run_summary(cfg);
        if (rolling->parsed()) return run_rolling(cfg);
        if (network->parsed()) return run_network(cfg);
        return run_ergm(cfg);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
