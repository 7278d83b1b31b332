#include "corrnet/netmetrics.hpp"

#include <algorithm>
#include <queue>
#include <stack>

#include "corrnet/io.hpp"

namespace corrnet::netmetrics {

namespace {

std::vector<std::vector<int>> adjacency(const filter::FilteredNetwork& g) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(g.size()));
    for (const auto& e : g.edges) {
        adj[static_cast<size_t>(e.i)].push_back(e.j);
        adj[static_cast<size_t>(e.j)].push_back(e.i);
    }
    return adj;
}

int label_index(const filter::FilteredNetwork& g, const std::string& label) {
    const auto it = std::find(g.names.begin(), g.names.end(), label);
    if (it == g.names.end()) throw DataError("unknown node label: " + label);
    return static_cast<int>(it - g.names.begin());
}

}  // namespace

double network_length(const filter::FilteredNetwork& g) {
    if (g.edges.empty()) throw DataError("network length undefined for an empty edge set");
    return filter::total_weight(g) / static_cast<double>(g.edges.size());
}

double network_length_var(const filter::FilteredNetwork& g) {
    if (g.edges.empty()) throw DataError("network length variance undefined for an empty edge set");
    const double mean = network_length(g);
    double s = 0.0;
    for (const auto& e : g.edges) {
        const double dev = e.weight - mean;
        s += dev * dev;
    }
    return s / static_cast<double>(g.edges.size());
}

std::pair<int, std::string> max_degree(const filter::FilteredNetwork& g) {
    const int n = g.size();
    if (n < 2) throw DataError("max degree needs at least 2 nodes");
    std::vector<int> degree(static_cast<size_t>(n), 0);
    for (const auto& e : g.edges) {
        ++degree[static_cast<size_t>(e.i)];
        ++degree[static_cast<size_t>(e.j)];
    }
    int best = 0;
    for (int v = 1; v < n; ++v) {
        const auto u = static_cast<size_t>(v);
        const auto b = static_cast<size_t>(best);
        if (degree[u] > degree[b] || (degree[u] == degree[b] && g.names[u] < g.names[b])) best = v;
    }
    return {degree[static_cast<size_t>(best)], g.names[static_cast<size_t>(best)]};
}

std::vector<double> betweenness(const filter::FilteredNetwork& g) {
    const int n = g.size();
    const auto adj = adjacency(g);
    std::vector<double> cb(static_cast<size_t>(n), 0.0);

    // Brandes accumulation without the undirected halving, so each
    // unordered pair counts once per direction.
    for (int s = 0; s < n; ++s) {
        std::vector<int> dist(static_cast<size_t>(n), -1);
        std::vector<double> sigma(static_cast<size_t>(n), 0.0);
        std::vector<std::vector<int>> pred(static_cast<size_t>(n));
        std::vector<int> order;
        order.reserve(static_cast<size_t>(n));

        dist[static_cast<size_t>(s)] = 0;
        sigma[static_cast<size_t>(s)] = 1.0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            order.push_back(v);
            for (int w : adj[static_cast<size_t>(v)]) {
                const auto uw = static_cast<size_t>(w);
                if (dist[uw] < 0) {
                    dist[uw] = dist[static_cast<size_t>(v)] + 1;
                    q.push(w);
                }
                if (dist[uw] == dist[static_cast<size_t>(v)] + 1) {
                    sigma[uw] += sigma[static_cast<size_t>(v)];
                    pred[uw].push_back(v);
                }
            }
        }

        std::vector<double> delta(static_cast<size_t>(n), 0.0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto uw = static_cast<size_t>(*it);
            for (int v : pred[uw]) {
                const auto uv = static_cast<size_t>(v);
                delta[uv] += sigma[uv] / sigma[uw] * (1.0 + delta[uw]);
            }
            if (*it != s) cb[uw] += delta[uw];
        }
    }
    return cb;
}

double mean_occupation_layer(const filter::FilteredNetwork& g, const std::string& central) {
    const int n = g.size();
    const int root = label_index(g, central);
    const auto adj = adjacency(g);
    std::vector<int> level(static_cast<size_t>(n), 0);
    std::vector<bool> seen(static_cast<size_t>(n), false);
    std::queue<int> q;
    seen[static_cast<size_t>(root)] = true;
    q.push(root);
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int w : adj[static_cast<size_t>(v)]) {
            const auto uw = static_cast<size_t>(w);
            if (seen[uw]) continue;
            seen[uw] = true;
            level[uw] = level[static_cast<size_t>(v)] + 1;
            q.push(w);
        }
    }
    double s = 0.0;
    for (int v = 0; v < n; ++v) s += level[static_cast<size_t>(v)];
    return s / static_cast<double>(n);
}

std::string central_node(const filter::FilteredNetwork& g) {
    const int n = g.size();
    if (n < 2) throw DataError("central node needs at least 2 nodes");
    const auto cb = betweenness(g);
    int best = 0;
    for (int v = 1; v < n; ++v) {
        const auto u = static_cast<size_t>(v);
        const auto b = static_cast<size_t>(best);
        if (cb[u] > cb[b] || (cb[u] == cb[b] && g.names[u] < g.names[b])) best = v;
    }
    return g.names[static_cast<size_t>(best)];
}

NetworkStats compute_stats(const filter::FilteredNetwork& g) {
    NetworkStats st;
    st.length = network_length(g);
    st.length_var = network_length_var(g);
    std::tie(st.max_degree, st.max_degree_node) = max_degree(g);
    st.betweenness = betweenness(g);
    st.central = central_node(g);
    st.mol = mean_occupation_layer(g, st.central);
    return st;
}

RollingSeries rolling_run(const ingest::YieldPanel& panel, const ingest::WindowSpec& spec,
                          correlation::Kind kind, const std::vector<filter::Method>& methods) {
    if (methods.empty()) throw DataError("rolling run needs at least one filtering method");
    RollingSeries series;
    series.methods = methods;
    for (const auto& window : ingest::windows(panel, spec)) {
        try {
            const auto corr = correlation::correlation_matrix(window.values, panel.names, kind);
            const auto dist = correlation::to_distance(corr);
            RollingRow row;
            row.window_end = window.end_date;
            row.mean_corr = correlation::mean_correlation(corr);
            row.corr_var = correlation::corr_variance(corr);
            for (const auto m : methods) {
                filter::FilteredNetwork g;
                switch (m) {
                    case filter::Method::MST: g = filter::mst(dist); break;
                    case filter::Method::MaST: g = filter::mast(dist); break;
                    case filter::Method::AG: g = filter::asset_graph(dist); break;
                    case filter::Method::TMFG: g = filter::tmfg(dist); break;
                }
                row.per_method.push_back(compute_stats(g));
            }
            series.rows.push_back(std::move(row));
        } catch (const Error& e) {
            throw DataError("window ending " + window.end_date + ": " + e.what());
        }
    }
    return series;
}

void write_rolling_csv(std::ostream& out, const RollingSeries& series) {
    out << "window_end,mean_corr,corr_var";
    for (const auto m : series.methods) {
        const auto name = filter::method_name(m);
        out << ',' << name << "_length," << name << "_length_var," << name << "_max_degree,"
            << name << "_central," << name << "_mol";
    }
    out << '\n';
    for (const auto& row : series.rows) {
        out << row.window_end << ',' << fmt_g(row.mean_corr) << ',' << fmt_g(row.corr_var);
        for (const auto& st : row.per_method) {
            out << ',' << fmt_g(st.length) << ',' << fmt_g(st.length_var) << ',' << st.max_degree
                << ',' << st.central << ',' << fmt_g(st.mol);
        }
        out << '\n';
    }
}

}  // namespace corrnet::netmetrics
