#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrnet/correlation.hpp"
#include "corrnet/errors.hpp"

namespace corrnet::filter {

enum class Method { MST, MaST, AG, TMFG };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct Edge {
    int i = 0;  // i < j always
    int j = 0;
    double weight = 0.0;
};

struct FilteredNetwork {
    std::vector<std::string> names;
    std::vector<Edge> edges;  // sorted by (i, j)
    Method method = Method::MST;

    int size() const { return static_cast<int>(names.size()); }
};

double total_weight(const FilteredNetwork& g);

// Spanning tree of minimum total distance; ties resolved by (weight, i, j)
// so the edge set is reproducible across platforms.
FilteredNetwork mst(const correlation::DistanceMatrix& d);

// Spanning tree of maximum total distance; same rule with descending weight.
FilteredNetwork mast(const correlation::DistanceMatrix& d);

// The n-1 globally smallest distances; connectivity is not enforced.
FilteredNetwork asset_graph(const correlation::DistanceMatrix& d);

// Triangulated maximally filtered graph on similarity scores s = 2 - d:
// exhaustive best 4-clique seed, then greedy max-gain (vertex, face)
// insertions until all vertices are placed; 3(n-2) edges, planar.
FilteredNetwork tmfg(const correlation::DistanceMatrix& d);

// Subdominant ultrametric of a spanning tree: entry (i, j) is the largest
// edge weight on the unique tree path between i and j.
correlation::DistanceMatrix ultrametric(const FilteredNetwork& tree);

void write_edge_header(std::ostream& out);
void write_edges_csv(std::ostream& out, const FilteredNetwork& g, const std::string& window_end);
nlohmann::json edges_to_json(const FilteredNetwork& g, const std::string& window_end);

}  // namespace corrnet::filter
