#pragma once

#include "nicki/tensor.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nicki {

enum class FeatureKind { none, discrete, continuous };

std::string to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& s);

using Edge = std::pair<Index, Index>;

/// Undirected, unweighted, optionally attributed graph with node labels.
///
/// Immutable after construction. Self loops and duplicate edges given to the
/// constructor are dropped; the retained edge list is sorted with u < v.
/// The dense adjacency has zero diagonal and entries in {0, 1}.
class Graph {
public:
    Graph() = default;
    Graph(Index num_nodes, std::vector<Edge> edges, Matrix features, FeatureKind kind,
          std::vector<int> labels, int num_classes = -1);

    Index num_nodes() const { return n_; }
    Index num_edges() const { return static_cast<Index>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Matrix& adjacency() const { return adjacency_; }

    FeatureKind feature_kind() const { return kind_; }
    bool has_features() const { return kind_ != FeatureKind::none; }
    const Matrix& features() const { return features_; }
    Index feature_dim() const { return features_.cols(); }

    const std::vector<int>& labels() const { return labels_; }
    int num_classes() const { return num_classes_; }
    std::vector<Index> nodes_of_class(int label) const;
    std::vector<Index> class_sizes() const;

    std::vector<Index> degrees() const;
    double average_degree() const;

    // Edges dropped at construction (self loops + duplicates).
    Index dropped_edges() const { return dropped_; }

private:
    Index n_ = 0;
    std::vector<Edge> edges_;
    Matrix adjacency_;
    Matrix features_;
    FeatureKind kind_ = FeatureKind::none;
    std::vector<int> labels_;
    int num_classes_ = 0;
    Index dropped_ = 0;
};

// ---------------------------------------------------------------------------
// Text formats
//
//   edges.tsv     one "u<TAB>v" per line, 0-indexed, each undirected pair once
//   features.txt  header "n D kind" then n rows of D space-separated numbers
//   labels.txt    one integer class id per line; the line count fixes n

Graph load_graph(const std::filesystem::path& edge_path,
                 const std::optional<std::filesystem::path>& feature_path,
                 const std::filesystem::path& label_path);

// Loads edges.tsv, labels.txt and (when present) features.txt from `dir`.
Graph load_graph_dir(const std::filesystem::path& dir);
void save_graph_dir(const Graph& g, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Splits

struct Split {
    std::vector<Index> train;
    std::vector<Index> val;
    std::vector<Index> test;
    std::uint64_t seed = 0;
};

// Stratified random split; per-class counts are the floor or ceiling of the
// class share and global counts are round(fraction * n).
Split split_nodes(const Graph& g, std::array<double, 3> fractions, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic fixtures

struct SbmOptions {
    std::vector<Index> sizes = {150, 150};
    double p_in = 0.05;
    double p_out = 0.005;
    Index feature_dim = 64;
    // Probability a feature bit survives unflipped from its class prototype.
    double signal = 0.8;
    // Density of ones in each class prototype.
    double prototype_density = 0.2;
    FeatureKind feature_kind = FeatureKind::discrete;
    std::uint64_t seed = 1;
};

// Stochastic block model with class-correlated features. Continuous
// features are Gaussian around per-class prototype means.
Graph sbm_generate(const SbmOptions& options);

// Erdős–Rényi G(n, p) without labels beyond class 0; used by tests.
Graph erdos_renyi(Index n, double p, std::uint64_t seed);

} // namespace nicki
