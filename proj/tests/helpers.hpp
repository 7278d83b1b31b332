#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "corrnet/correlation.hpp"
#include "corrnet/filter.hpp"
#include "corrnet/io.hpp"

namespace testutil {

inline std::filesystem::path test_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "corrnet_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_file(const std::string& name, const std::string& content) {
    const auto path = test_dir() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<std::string> node_names(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("N" + std::string(i < 10 ? "0" : "") + std::to_string(i));
    return names;
}

inline corrnet::correlation::DistanceMatrix dist_from(const std::vector<std::string>& names,
                                                      const std::vector<std::vector<double>>& m) {
    corrnet::correlation::DistanceMatrix d;
    d.names = names;
    const auto n = static_cast<Eigen::Index>(names.size());
    d.d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            d.d(i, j) = m[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return d;
}

inline corrnet::correlation::DistanceMatrix random_distance(int n, std::mt19937_64& rng) {
    corrnet::correlation::DistanceMatrix d;
    d.names = node_names(n);
    d.d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.05 + 1.9 * corrnet::uniform_unit(rng);
            d.d(i, j) = v;
            d.d(j, i) = v;
        }
    return d;
}

inline corrnet::filter::FilteredNetwork make_net(const std::vector<std::string>& names,
                                                 std::vector<corrnet::filter::Edge> edges,
                                                 corrnet::filter::Method method) {
    corrnet::filter::FilteredNetwork g;
    g.names = names;
    g.edges = std::move(edges);
    g.method = method;
    return g;
}

}  // namespace testutil
