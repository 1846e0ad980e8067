#pragma once

#include "nicki/hiding.hpp"
#include "nicki/models.hpp"
#include "nicki/poison.hpp"
#include "nicki/topm.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace nicki {

struct AttackConfig {
    int target_class = 0;
    int base_class = 1;
    double ratio = 0.1;
    double tau_start = 1.0;
    double tau_end = 0.1;
    double alpha = 0.1;
    bool hide = false;
    bool gumbel = true;
    int outer_epochs = 50;
    int surrogate_epochs = 50;
    int evaluator_epochs = 200;
    Index surrogate_hidden = 16;
    Index encoder_hidden = 64;
    Index latent_dim = 32;
    double lr = 0.01;
    bool select_best_val = true;
    FeatureBudgetMode feature_budget = FeatureBudgetMode::per_node;
    HidingOptions hiding;
    std::uint64_t seed = 0;
};

// Throws ConfigError for inconsistent settings against `g`.
void validate_config(const Graph& g, const AttackConfig& cfg);

// Linear schedule from tau_start at epoch 0 to tau_end at the last epoch.
double temperature(const AttackConfig& cfg, int epoch);

/// Trainable generator: embedding encoder, feature scorer and edge scorer.
struct Generator {
    GcnModel encoder;
    MlpModel feature_scorer;
    MlpModel edge_scorer;

    // Featureless graphs have no feature scorer; the edge scorer then reads
    // embedding rows instead of feature rows.
    static Generator glorot(const Graph& g, Index k, const AttackConfig& cfg, Rng& rng);
    static Generator zeros(const Graph& g, Index k, const AttackConfig& cfg);

    std::vector<Tensor> parameters() const;
    NamedTensors named_parameters() const;
};

/// Everything an outer iteration needs that does not change across
/// iterations: the intermediate-graph operator and inputs, candidate pairs
/// and the base adjacency the relaxed edges are scattered onto.
struct AttackContext {
    const Graph* graph = nullptr;
    PoisonState state;
    Budget budget;
    PairList pairs;
    std::shared_ptr<const Matrix> a_p_hat;
    std::shared_ptr<const Matrix> x_p;
    Matrix base_adjacency;
    // Feature positions (row-major in X_A) open to selection.
    std::vector<Index> feature_positions;
};

AttackContext make_context(const Graph& g, PoisonState state, const Budget& budget);

// Z for every node of the intermediate graph; attackers are the last k rows.
Var infer_embeddings(const AttackContext& ctx, const Var& x_p, const Generator& gen);

// S_x = F_x(Z_A), k×D.
Var score_features(const Var& z_a, const MlpModel& feature_scorer);

/// Discrete graphs: relaxed top-Δx over the open entries of S_x, scattered
/// back into a k×D matrix.
Var select_features_discrete(const Var& s_x, const std::vector<Index>& positions, Index budget,
                             const TopmOptions& options);

// lo + sigmoid(S_x) ⊙ (hi − lo), column-wise ranges.
Var select_features_continuous(const Var& s_x, const Eigen::RowVectorXd& lo,
                               const Eigen::RowVectorXd& hi);

/// F_e(xᵢ ⊙ xⱼ) for every candidate pair, with disabled candidates replaced
/// by kMaskedScore. `rows` holds one row per node of the poisoned graph.
Var score_edges(const Var& rows, const PairList& pairs, const MlpModel& edge_scorer,
                const std::vector<bool>& candidates);

struct EdgeSelection {
    // Relaxed selection weights over candidate pairs (column vector).
    Var weights;
    // Relaxed adjacency of the poisoned graph.
    Var adjacency;
};

EdgeSelection select_edges(const Var& scores, const AttackContext& ctx, Index budget,
                           const TopmOptions& options);

/// Mean over attackers of −Σⱼ q̄ⱼ log Qᵢⱼ, with q̄ the mean probability row of
/// the target-class nodes.
Var misclassification_loss(const Var& q, const std::vector<Index>& attacker_ids,
                           const std::vector<Index>& target_ids);

/// −(1/k) Σᵢ x̄ᵢ · log p̄ᵢ with x̄, p̄ the L1-normalized rows of X_A and PF.
/// All-zero PF rows are replaced by uniform rows.
Var hiding_feature_loss(const Var& x_a, const Matrix& pf);

Var total_loss(const Var& l_m, const Var& l_f, double alpha);

/// Discrete outcome of one iteration.
struct Snapshot {
    std::vector<Index> chosen_edges;  // indices into ctx.pairs
    Matrix x_a;                       // k×D attacker features
};

Snapshot discretize_selection(const AttackContext& ctx, const Eigen::VectorXd& edge_weights,
                              const Matrix& x_a_relaxed);

PoisonedGraph snapshot_graph(const AttackContext& ctx, const Snapshot& snap, int attacker_label);

struct EpochRecord {
    int epoch = 0;
    double loss = 0.0;
    double target_accuracy = 0.0;
    double tau = 0.0;
};

struct AttackResult {
    PoisonedGraph poisoned;
    std::vector<EpochRecord> history;
    HidingResult hiding;
    Generator generator;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Outer optimization: per epoch build the relaxed selections, train a
/// surrogate on the discrete snapshot, back-propagate the attack loss through
/// the frozen surrogate into the generator, take one Adam step and score the
/// snapshot with a freshly trained evaluator. Returns the snapshot with the
/// lowest target-class accuracy.
AttackResult run_attack(const Graph& g, const Split& split, const AttackConfig& cfg,
                        const EpochCallback& on_epoch = {});

// Training ids for a poisoned graph: the clean training ids plus attackers.
std::vector<Index> poisoned_train_ids(const Split& split, const PoisonedGraph& pg);

// Features handed to GCNs: the graph's features, or the identity when featureless.
Matrix model_features(const Graph& g);

} // namespace nicki
