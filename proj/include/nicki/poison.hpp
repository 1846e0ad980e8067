#pragma once

#include "nicki/graph.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace nicki {

using PairList = std::vector<std::pair<Index, Index>>;

/// Candidate injected edges for n original nodes and k attackers, in global
/// node ids (attacker a has id n + a). Canonical order: every (i, n + a) for
/// a = 0..k−1 outer and i = 0..n−1 inner (the N×k block column by column),
/// then attacker pairs (n + a, n + b), a < b, row by row.
PairList candidate_pairs(Index n, Index k);

/// Injected-node block state: B (n×k), C (k×k), attacker features X_A (k×D)
/// and the masks saying which entries the attack may still choose.
struct PoisonState {
    Index n = 0;
    Index k = 0;
    Matrix b;
    Matrix c;
    Matrix x_a;
    // One flag per entry of candidate_pairs(n, k).
    std::vector<bool> edge_candidates;
    // One flag per entry of X_A in row-major order.
    std::vector<bool> feature_candidates;
    // Pretend edges as (base node, attacker) global ids.
    std::vector<Edge> pretend_edges;
    // k×D hiding target for attacker features; empty when hiding is off.
    Matrix pretend_features;

    // B = 0, C = I, X_A = 0, every candidate enabled.
    static PoisonState fresh(const Graph& g, Index k);

    Index num_edge_candidates() const { return static_cast<Index>(edge_candidates.size()); }
    Index num_enabled_edge_candidates() const;
};

/// A' = [[A, B], [Bᵀ, C]] with C's diagonal left out: injected nodes get
/// self loops only through the normalization step, like every other node.
Matrix assembled_adjacency(const Graph& g, const PoisonState& state);

/// Attacker-aware view fed to the embedding model: A_P equals A' on the
/// original block and is 1 on every attacker row and column (diagonal
/// included); X_P equals X on original rows and is all ones on attacker rows.
/// For featureless graphs X_P is the (n+k) identity.
std::pair<Matrix, Matrix> build_intermediate(const Graph& g, const PoisonState& state);

enum class FeatureBudgetMode {
    // k × ⌊average ones per node⌋
    per_node,
    // ⌊average ones per node⌋ for all attackers together
    total,
};

struct Budget {
    Index delta_e = 0;
    Index delta_x = 0;
    FeatureKind kind = FeatureKind::discrete;
    // Per-column [lo, hi] of the clean features (continuous graphs).
    Eigen::RowVectorXd range_lo;
    Eigen::RowVectorXd range_hi;

    bool feature_budget_applies() const { return kind == FeatureKind::discrete; }
};

// ⌊k · avg_degree⌋
Index edge_budget(Index k, double avg_degree);

Budget compute_budgets(const Graph& g, Index k, FeatureBudgetMode mode = FeatureBudgetMode::per_node);

// ⌊ratio · |target class|⌋, guarded against floating round-off.
Index injection_count(const Graph& g, int target_class, double ratio);

/// Clean graph plus injected nodes. Nodes 0..num_original−1 are the clean
/// graph unchanged; the last k nodes are attackers.
struct PoisonedGraph {
    Graph graph;
    Index num_original = 0;
    Index k = 0;
    Budget budget;
    std::string method;
    int target_class = 0;
    int base_class = 0;
    std::vector<Edge> pretend_edges;
    std::vector<double> accuracy_history;
    std::vector<double> loss_history;
    int selected_epoch = -1;
    Split split;
    std::map<std::string, std::string> config;

    std::vector<Index> injected_ids() const;
};

/// Builds the poisoned graph from chosen injected edges (global ids, each
/// touching an attacker) and attacker feature rows.
Graph inject(const Graph& clean, Index k, const std::vector<Edge>& new_edges, const Matrix& x_a,
             int attacker_label);

struct BudgetCheck {
    // ‖A'‖₀ − ‖A‖₀, counted over both triangles.
    Index edge_entries_added = 0;
    // 2 × number of pretend edges, which are not charged to Δe.
    Index pretend_entries = 0;
    // ‖X'‖₀ − ‖X‖₀
    Index feature_ones_added = 0;
    bool original_adjacency_identical = false;
    bool original_features_identical = false;

    bool satisfied(const Budget& budget) const;
};

BudgetCheck check_budget(const Graph& clean, const PoisonedGraph& pg);

// Clean graph recovered from the first num_original nodes.
Graph original_subgraph(const PoisonedGraph& pg);

/// Writes edges.tsv, labels.txt, features.txt (if any) and manifest.json.
void save_poisoned(const PoisonedGraph& pg, const std::filesystem::path& dir);
PoisonedGraph load_poisoned(const std::filesystem::path& dir);

} // namespace nicki
