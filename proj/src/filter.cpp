#include "corrnet/filter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "corrnet/io.hpp"

namespace corrnet::filter {

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }

    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<size_t>(b)] = a;
        return true;
    }
};

std::vector<Edge> all_edges(const correlation::DistanceMatrix& d) {
    const int n = static_cast<int>(d.size());
    std::vector<Edge> edges;
    edges.reserve(static_cast<size_t>(n) * static_cast<size_t>(n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, d.d(i, j)});
    return edges;
}

void sort_canonical(std::vector<Edge>& edges) {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
}

FilteredNetwork spanning_tree(const correlation::DistanceMatrix& d, bool maximize) {
    const int n = static_cast<int>(d.size());
    if (n < 2) throw DataError("spanning tree: need at least 2 nodes");
    auto edges = all_edges(d);
    std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
        if (a.weight != b.weight) return maximize ? a.weight > b.weight : a.weight < b.weight;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    FilteredNetwork g;
    g.names = d.names;
    g.method = maximize ? Method::MaST : Method::MST;
    UnionFind uf(n);
    for (const auto& e : edges) {
        if (uf.unite(e.i, e.j)) {
            g.edges.push_back(e);
            if (static_cast<int>(g.edges.size()) == n - 1) break;
        }
    }
    sort_canonical(g.edges);
    return g;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::MST: return "mst";
        case Method::MaST: return "mast";
        case Method::AG: return "ag";
        case Method::TMFG: return "tmfg";
    }
    throw SpecError("unknown method enum value");
}

Method parse_method(const std::string& name) {
    if (name == "mst") return Method::MST;
    if (name == "mast") return Method::MaST;
    if (name == "ag") return Method::AG;
    if (name == "tmfg") return Method::TMFG;
    throw SpecError("unknown filtering method: " + name);
}

double total_weight(const FilteredNetwork& g) {
    double s = 0.0;
    for (const auto& e : g.edges) s += e.weight;
    return s;
}

FilteredNetwork mst(const correlation::DistanceMatrix& d) { return spanning_tree(d, false); }

FilteredNetwork mast(const correlation::DistanceMatrix& d) { return spanning_tree(d, true); }

FilteredNetwork asset_graph(const correlation::DistanceMatrix& d) {
    const int n = static_cast<int>(d.size());
    if (n < 2) throw DataError("asset graph: need at least 2 nodes");
    auto edges = all_edges(d);
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.weight != b.weight) return a.weight < b.weight;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    FilteredNetwork g;
    g.names = d.names;
    g.method = Method::AG;
    g.edges.assign(edges.begin(), edges.begin() + (n - 1));
    sort_canonical(g.edges);
    return g;
}

FilteredNetwork tmfg(const correlation::DistanceMatrix& d) {
    const int n = static_cast<int>(d.size());
    if (n < 4) throw SpecError("tmfg: need at least 4 nodes");

    auto score = [&](int a, int b) { return 2.0 - d.d(a, b); };

    // Exhaustive max-score seed clique; first quadruple wins ties since
    // the scan is in lexicographic order and only strict improvements win.
    std::array<int, 4> seed{0, 1, 2, 3};
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                for (int e = c + 1; e < n; ++e) {
                    const double s = score(a, b) + score(a, c) + score(a, e) + score(b, c) +
                                     score(b, e) + score(c, e);
                    if (s > best) {
                        best = s;
                        seed = {a, b, c, e};
                    }
                }

    FilteredNetwork g;
    g.names = d.names;
    g.method = Method::TMFG;
    std::vector<bool> placed(static_cast<size_t>(n), false);
    for (int v : seed) placed[static_cast<size_t>(v)] = true;
    for (size_t p = 0; p < 4; ++p)
        for (size_t q = p + 1; q < 4; ++q)
            g.edges.push_back({seed[p], seed[q], d.d(seed[p], seed[q])});

    std::vector<std::array<int, 3>> faces = {{seed[0], seed[1], seed[2]},
                                             {seed[0], seed[1], seed[3]},
                                             {seed[0], seed[2], seed[3]},
                                             {seed[1], seed[2], seed[3]}};

    for (int placed_count = 4; placed_count < n; ++placed_count) {
        double best_gain = -std::numeric_limits<double>::infinity();
        int best_vertex = -1;
        size_t best_face = 0;
        for (int v = 0; v < n; ++v) {
            if (placed[static_cast<size_t>(v)]) continue;
            for (size_t f = 0; f < faces.size(); ++f) {
                const auto& face = faces[f];
                const double gain = score(v, face[0]) + score(v, face[1]) + score(v, face[2]);
                const bool better =
                    gain > best_gain ||
                    (gain == best_gain &&
                     (v < best_vertex || (v == best_vertex && face < faces[best_face])));
                if (better) {
                    best_gain = gain;
                    best_vertex = v;
                    best_face = f;
                }
            }
        }
        const auto face = faces[best_face];
        placed[static_cast<size_t>(best_vertex)] = true;
        for (int u : face) {
            const int i = std::min(best_vertex, u);
            const int j = std::max(best_vertex, u);
            g.edges.push_back({i, j, d.d(i, j)});
        }
        faces.erase(faces.begin() + static_cast<std::ptrdiff_t>(best_face));
        for (size_t p = 0; p < 3; ++p)
            for (size_t q = p + 1; q < 3; ++q) {
                std::array<int, 3> nf{best_vertex, face[p], face[q]};
                std::sort(nf.begin(), nf.end());
                faces.push_back(nf);
            }
    }
    sort_canonical(g.edges);
    return g;
}

correlation::DistanceMatrix ultrametric(const FilteredNetwork& tree) {
    const int n = tree.size();
    if (static_cast<int>(tree.edges.size()) != n - 1)
        throw SpecError("ultrametric: input is not a spanning tree (wrong edge count)");
    UnionFind uf(n);
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(n));
    for (const auto& e : tree.edges) {
        if (!uf.unite(e.i, e.j))
            throw SpecError("ultrametric: input is not a spanning tree (contains a cycle)");
        adj[static_cast<size_t>(e.i)].push_back({e.j, e.weight});
        adj[static_cast<size_t>(e.j)].push_back({e.i, e.weight});
    }

    correlation::DistanceMatrix u;
    u.names = tree.names;
    u.d = Eigen::MatrixXd::Zero(n, n);
    for (int src = 0; src < n; ++src) {
        std::vector<bool> seen(static_cast<size_t>(n), false);
        std::queue<int> q;
        seen[static_cast<size_t>(src)] = true;
        q.push(src);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (const auto& [w, weight] : adj[static_cast<size_t>(v)]) {
                if (seen[static_cast<size_t>(w)]) continue;
                seen[static_cast<size_t>(w)] = true;
                u.d(src, w) = std::max(u.d(src, v), weight);
                q.push(w);
            }
        }
    }
    return u;
}

void write_edge_header(std::ostream& out) { out << "source,target,distance,method,window_end\n"; }

void write_edges_csv(std::ostream& out, const FilteredNetwork& g, const std::string& window_end) {
    for (const auto& e : g.edges) {
        out << g.names[static_cast<size_t>(e.i)] << ',' << g.names[static_cast<size_t>(e.j)] << ','
            << fmt_g(e.weight) << ',' << method_name(g.method) << ',' << window_end << '\n';
    }
}

nlohmann::json edges_to_json(const FilteredNetwork& g, const std::string& window_end) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges) {
        edges.push_back({{"source", g.names[static_cast<size_t>(e.i)]},
                         {"target", g.names[static_cast<size_t>(e.j)]},
                         {"distance", e.weight}});
    }
    return {{"method", method_name(g.method)}, {"window_end", window_end}, {"edges", edges}};
}

}  // namespace corrnet::filter
