#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "corrnet/filter.hpp"
#include "corrnet/ingest.hpp"

namespace corrnet::netmetrics {

struct NetworkStats {
    double length = 0.0;
    double length_var = 0.0;
    int max_degree = 0;
    std::string max_degree_node;
    double mol = 0.0;
    std::string central;
    std::vector<double> betweenness;
};

// Mean edge weight.
double network_length(const filter::FilteredNetwork& g);

// Population variance of edge weights.
double network_length_var(const filter::FilteredNetwork& g);

// Highest incident-edge count and its node; ties go to the
// lexicographically smallest label.
std::pair<int, std::string> max_degree(const filter::FilteredNetwork& g);

// Betweenness over ordered node pairs on the unweighted topology
// (twice the unordered value); disconnected pairs contribute nothing.
std::vector<double> betweenness(const filter::FilteredNetwork& g);

// Mean hop level relative to the central node; the central node itself
// and nodes unreachable from it sit at level 0.
double mean_occupation_layer(const filter::FilteredNetwork& g, const std::string& central);

// Betweenness argmax; ties go to the lexicographically smallest label.
std::string central_node(const filter::FilteredNetwork& g);

NetworkStats compute_stats(const filter::FilteredNetwork& g);

struct RollingRow {
    std::string window_end;
    double mean_corr = 0.0;
    double corr_var = 0.0;
    std::vector<NetworkStats> per_method;  // parallel to RollingSeries::methods
};

struct RollingSeries {
    std::vector<filter::Method> methods;
    std::vector<RollingRow> rows;
};

// Full per-window pipeline: correlations -> distances -> each requested
// filter -> statistics. Any window failure aborts the run with the
// window-end date attached.
RollingSeries rolling_run(const ingest::YieldPanel& panel, const ingest::WindowSpec& spec,
                          correlation::Kind kind, const std::vector<filter::Method>& methods);

void write_rolling_csv(std::ostream& out, const RollingSeries& series);

}  // namespace corrnet::netmetrics
