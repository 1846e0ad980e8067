#include "nicki/attack.hpp"

#include "nicki/errors.hpp"
#include "nicki/log.hpp"
#include "nicki/optim.hpp"
#include "nicki/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nicki {

void validate_config(const Graph& g, const AttackConfig& cfg)
{
    const int classes = g.num_classes();
    if (cfg.target_class < 0 || cfg.target_class >= classes) {
        throw ConfigError("target class " + std::to_string(cfg.target_class) + " does not exist");
    }
    if (cfg.base_class < 0 || cfg.base_class >= classes) {
        throw ConfigError("base class " + std::to_string(cfg.base_class) + " does not exist");
    }
    if (cfg.target_class == cfg.base_class) {
        throw ConfigError("target and base class must differ");
    }
    if (!(cfg.ratio > 0.0) || cfg.ratio > 1.0) {
        throw ConfigError("ratio must lie in (0, 1]");
    }
    if (!(cfg.tau_start > 0.0) || !(cfg.tau_end > 0.0)) {
        throw ConfigError("temperatures must be positive");
    }
    if (cfg.alpha < 0.0) {
        throw ConfigError("alpha must be nonnegative");
    }
    if (cfg.hide && cfg.alpha == 0.0 && g.has_features()) {
        throw ConfigError("hiding requires a nonzero alpha");
    }
    if (cfg.outer_epochs < 1 || cfg.surrogate_epochs < 0 || cfg.evaluator_epochs < 0) {
        throw ConfigError("epoch counts must be positive");
    }
    if (g.nodes_of_class(cfg.base_class).empty()) {
        throw ConfigError("base class has no nodes");
    }
}

double temperature(const AttackConfig& cfg, int epoch)
{
    if (cfg.outer_epochs <= 1) {
        return cfg.tau_start;
    }
    const double f = static_cast<double>(epoch) / static_cast<double>(cfg.outer_epochs - 1);
    return cfg.tau_start + f * (cfg.tau_end - cfg.tau_start);
}

// ---------------------------------------------------------------------------
// Generator

namespace {

Index encoder_input(const Graph& g, Index k)
{
    return g.has_features() ? g.feature_dim() : g.num_nodes() + k;
}

Index pair_width(const Graph& g, const AttackConfig& cfg)
{
    return g.has_features() ? g.feature_dim() : cfg.latent_dim;
}

} // namespace

Generator Generator::glorot(const Graph& g, Index k, const AttackConfig& cfg, Rng& rng)
{
    Generator gen;
    gen.encoder = GcnModel::glorot(encoder_input(g, k), cfg.encoder_hidden, cfg.latent_dim, rng);
    if (g.has_features()) {
        gen.feature_scorer = MlpModel::glorot(feature_scorer_widths(cfg.latent_dim, g.feature_dim()), rng);
    }
    gen.edge_scorer = MlpModel::glorot(edge_scorer_widths(pair_width(g, cfg)), rng);
    return gen;
}

Generator Generator::zeros(const Graph& g, Index k, const AttackConfig& cfg)
{
    Generator gen;
    gen.encoder = GcnModel::zeros(encoder_input(g, k), cfg.encoder_hidden, cfg.latent_dim);
    if (g.has_features()) {
        gen.feature_scorer = MlpModel::zeros(feature_scorer_widths(cfg.latent_dim, g.feature_dim()));
    }
    gen.edge_scorer = MlpModel::zeros(edge_scorer_widths(pair_width(g, cfg)));
    return gen;
}

std::vector<Tensor> Generator::parameters() const
{
    std::vector<Tensor> out = encoder.parameters();
    for (const auto& t : feature_scorer.parameters()) {
        out.push_back(t);
    }
    for (const auto& t : edge_scorer.parameters()) {
        out.push_back(t);
    }
    return out;
}

NamedTensors Generator::named_parameters() const
{
    NamedTensors out = encoder.named_parameters("encoder");
    for (auto& p : feature_scorer.named_parameters("feature_scorer")) {
        out.push_back(std::move(p));
    }
    for (auto& p : edge_scorer.named_parameters("edge_scorer")) {
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline pieces

AttackContext make_context(const Graph& g, PoisonState state, const Budget& budget)
{
    AttackContext ctx;
    ctx.graph = &g;
    ctx.budget = budget;
    ctx.pairs = candidate_pairs(state.n, state.k);
    auto [a_p, x_p] = build_intermediate(g, state);
    ctx.a_p_hat = std::make_shared<const Matrix>(normalized_adjacency(a_p));
    ctx.x_p = std::make_shared<const Matrix>(std::move(x_p));
    ctx.base_adjacency = assembled_adjacency(g, state);
    for (std::size_t i = 0; i < state.feature_candidates.size(); ++i) {
        if (state.feature_candidates[i]) {
            ctx.feature_positions.push_back(static_cast<Index>(i));
        }
    }
    if (state.num_enabled_edge_candidates() < budget.delta_e) {
        throw ConfigError("edge budget " + std::to_string(budget.delta_e) + " exceeds the " +
                          std::to_string(state.num_enabled_edge_candidates()) +
                          " available candidate edges");
    }
    if (budget.feature_budget_applies() &&
        static_cast<Index>(ctx.feature_positions.size()) < budget.delta_x) {
        throw ConfigError("feature budget exceeds the available attacker feature entries");
    }
    ctx.state = std::move(state);
    return ctx;
}

Var infer_embeddings(const AttackContext& ctx, const Var& x_p, const Generator& gen)
{
    return gcn_forward(ctx.a_p_hat, x_p, gen.encoder);
}

Var score_features(const Var& z_a, const MlpModel& feature_scorer)
{
    return mlp_forward(z_a, feature_scorer);
}

Var select_features_discrete(const Var& s_x, const std::vector<Index>& positions, Index budget,
                             const TopmOptions& options)
{
    if (budget > static_cast<Index>(positions.size())) {
        throw ParameterError("select_features_discrete: budget exceeds candidate entries");
    }
    Var flat = gather_flat(s_x, positions);
    Var t = topm(flat, budget, options);
    return scatter_flat(t, positions, s_x.rows(), s_x.cols());
}

Var select_features_continuous(const Var& s_x, const Eigen::RowVectorXd& lo,
                               const Eigen::RowVectorXd& hi)
{
    if (lo.size() != s_x.cols() || hi.size() != s_x.cols()) {
        throw DimensionError("select_features_continuous: range width mismatch");
    }
    Tape& tape = *s_x.tape();
    const Index k = s_x.rows();
    Matrix span = (hi - lo).replicate(k, 1);
    Matrix base = lo.replicate(k, 1);
    return mul(sigmoid(s_x), tape.constant(std::move(span))) + tape.constant(std::move(base));
}

Var score_edges(const Var& rows, const PairList& pairs, const MlpModel& edge_scorer,
                const std::vector<bool>& candidates)
{
    Var scores = mlp_forward(pair_hadamard(rows, pairs), edge_scorer);
    return mask_scores(scores, candidates);
}

EdgeSelection select_edges(const Var& scores, const AttackContext& ctx, Index budget,
                           const TopmOptions& options)
{
    EdgeSelection sel;
    sel.weights = topm(scores, budget, options);
    sel.adjacency = scatter_symmetric(ctx.base_adjacency, sel.weights, ctx.pairs);
    return sel;
}

Var misclassification_loss(const Var& q, const std::vector<Index>& attacker_ids,
                           const std::vector<Index>& target_ids)
{
    if (target_ids.empty()) {
        throw ContractError("misclassification_loss: no target-class nodes");
    }
    if (attacker_ids.empty()) {
        throw ContractError("misclassification_loss: no attacker nodes");
    }
    Tape& tape = *q.tape();
    Var q_mean = mean_rows(q, target_ids);
    Var q_att = gather_rows(q, attacker_ids);
    Var ones = tape.constant(Matrix::Ones(static_cast<Index>(attacker_ids.size()), 1));
    // Broadcast the mean row over every attacker row.
    Var q_mean_rows = matmul(ones, q_mean);
    Var ce = mul(q_mean_rows, log(q_att));
    return scale(sum(ce), -1.0 / static_cast<double>(attacker_ids.size()));
}

Var hiding_feature_loss(const Var& x_a, const Matrix& pf)
{
    if (pf.rows() != x_a.rows() || pf.cols() != x_a.cols()) {
        throw DimensionError("hiding_feature_loss: PF and X_A shapes differ");
    }
    Tape& tape = *x_a.tape();
    Matrix p = pf.cwiseAbs();
    for (Index i = 0; i < p.rows(); ++i) {
        const double s = p.row(i).sum();
        if (s == 0.0) {
            log().warn("hiding_feature_loss: pretend feature row {} is all zero, using uniform", i);
            p.row(i).setConstant(1.0 / static_cast<double>(p.cols()));
        } else {
            p.row(i) /= s;
        }
    }
    Matrix log_p = (p.array() + kEps).log();
    Var x_bar = row_l1_normalize(x_a);
    return scale(sum(mul(x_bar, tape.constant(std::move(log_p)))),
                 -1.0 / static_cast<double>(x_a.rows()));
}

Var total_loss(const Var& l_m, const Var& l_f, double alpha)
{
    if (alpha < 0.0) {
        throw ParameterError("total_loss: alpha must be nonnegative");
    }
    return l_m + scale(l_f, alpha);
}

Snapshot discretize_selection(const AttackContext& ctx, const Eigen::VectorXd& edge_weights,
                              const Matrix& x_a_relaxed)
{
    Snapshot snap;
    Eigen::VectorXd w = edge_weights;
    for (std::size_t c = 0; c < ctx.state.edge_candidates.size(); ++c) {
        if (!ctx.state.edge_candidates[c]) {
            w(static_cast<Index>(c)) = -std::numeric_limits<double>::infinity();
        }
    }
    snap.chosen_edges = discretize(w, ctx.budget.delta_e);

    const Graph& g = *ctx.graph;
    if (g.feature_kind() == FeatureKind::discrete) {
        Eigen::VectorXd t(static_cast<Index>(ctx.feature_positions.size()));
        for (std::size_t c = 0; c < ctx.feature_positions.size(); ++c) {
            t(static_cast<Index>(c)) = x_a_relaxed.data()[ctx.feature_positions[c]];
        }
        snap.x_a = Matrix::Zero(ctx.state.k, g.feature_dim());
        for (Index c : discretize(t, ctx.budget.delta_x)) {
            snap.x_a.data()[ctx.feature_positions[static_cast<std::size_t>(c)]] = 1.0;
        }
    } else if (g.feature_kind() == FeatureKind::continuous) {
        snap.x_a = x_a_relaxed;
    } else {
        snap.x_a = Matrix(ctx.state.k, 0);
    }
    return snap;
}

PoisonedGraph snapshot_graph(const AttackContext& ctx, const Snapshot& snap, int attacker_label)
{
    std::vector<Edge> edges;
    for (Index c : snap.chosen_edges) {
        edges.push_back(ctx.pairs[static_cast<std::size_t>(c)]);
    }
    for (const auto& e : ctx.state.pretend_edges) {
        edges.push_back(e);
    }
    PoisonedGraph pg;
    pg.graph = inject(*ctx.graph, ctx.state.k, edges, snap.x_a, attacker_label);
    pg.num_original = ctx.state.n;
    pg.k = ctx.state.k;
    pg.budget = ctx.budget;
    pg.base_class = attacker_label;
    pg.pretend_edges = ctx.state.pretend_edges;
    return pg;
}

std::vector<Index> poisoned_train_ids(const Split& split, const PoisonedGraph& pg)
{
    std::vector<Index> ids = split.train;
    for (Index id : pg.injected_ids()) {
        ids.push_back(id);
    }
    return ids;
}

Matrix model_features(const Graph& g)
{
    if (g.has_features()) {
        return g.features();
    }
    return Matrix::Identity(g.num_nodes(), g.num_nodes());
}

// ---------------------------------------------------------------------------
// Outer loop

AttackResult run_attack(const Graph& g, const Split& split, const AttackConfig& cfg,
                        const EpochCallback& on_epoch)
{
    validate_config(g, cfg);
    const Index n = g.num_nodes();
    const Index k = injection_count(g, cfg.target_class, cfg.ratio);
    const Budget budget = compute_budgets(g, k, cfg.feature_budget);

    AttackResult result;
    PoisonState state = PoisonState::fresh(g, k);
    if (cfg.hide) {
        HidingOptions hiding = cfg.hiding;
        hiding.seed = derive_seed(cfg.seed, "hiding");
        result.hiding = run_hiding(g, split, cfg.base_class, state, hiding);
    }
    const AttackContext ctx = make_context(g, std::move(state), budget);
    const bool featured = g.has_features();
    const bool use_feature_loss = cfg.hide && featured && cfg.alpha > 0.0;

    Rng init_rng(derive_seed(cfg.seed, "generator.init"));
    result.generator = Generator::glorot(g, k, cfg, init_rng);
    const Generator& gen = result.generator;
    Adam adam(gen.parameters(), AdamOptions{cfg.lr});

    const std::vector<Index> target_ids = g.nodes_of_class(cfg.target_class);
    std::vector<Index> attacker_ids;
    for (Index a = 0; a < k; ++a) {
        attacker_ids.push_back(n + a);
    }

    double best_accuracy = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < cfg.outer_epochs; ++epoch) {
        const double tau = temperature(cfg, epoch);
        const auto e = static_cast<std::uint64_t>(epoch);
        Tape tape;
        Var x_p = tape.constant(*ctx.x_p);
        Var z = infer_embeddings(ctx, x_p, gen);

        Var x_a;
        Var pair_rows;
        Matrix x_a_value(k, 0);
        if (featured) {
            Var s_x = score_features(slice_rows(z, n, k), gen.feature_scorer);
            if (g.feature_kind() == FeatureKind::discrete) {
                x_a = select_features_discrete(
                    s_x, ctx.feature_positions, budget.delta_x,
                    TopmOptions{tau, cfg.gumbel, derive_seed(cfg.seed, "topm.features", e)});
            } else {
                x_a = select_features_continuous(s_x, budget.range_lo, budget.range_hi);
            }
            x_a_value = x_a.value();
            pair_rows = vstack(tape.constant(g.features()), x_a);
        } else {
            pair_rows = z;
        }
        Var s_e = score_edges(pair_rows, ctx.pairs, gen.edge_scorer, ctx.state.edge_candidates);
        EdgeSelection sel = select_edges(
            s_e, ctx, budget.delta_e, TopmOptions{tau, cfg.gumbel, derive_seed(cfg.seed, "topm.edges", e)});

        const Snapshot snap = discretize_selection(ctx, Eigen::VectorXd(sel.weights.value().col(0)), x_a_value);
        PoisonedGraph pg = snapshot_graph(ctx, snap, cfg.base_class);
        const auto a_hat = std::make_shared<const SparseMatrix>(
            normalized_adjacency(pg.graph.num_nodes(), pg.graph.edges()));
        const Matrix feats = model_features(pg.graph);
        const std::vector<Index> train_ids = poisoned_train_ids(split, pg);

        TrainOptions sur_opts;
        sur_opts.hidden = cfg.surrogate_hidden;
        sur_opts.epochs = cfg.surrogate_epochs;
        sur_opts.lr = 0.01;
        sur_opts.select_best_val = cfg.select_best_val;
        sur_opts.seed = derive_seed(cfg.seed, "surrogate", e);
        const TrainResult surrogate =
            train_surrogate(a_hat, feats, pg.graph.labels(), g.num_classes(), train_ids, split.val, sur_opts);

        Var a_rel = gcn_normalize(sel.adjacency);
        Var x_rel = featured ? pair_rows : tape.constant(feats);
        Var q = row_softmax(gcn_forward(a_rel, x_rel, surrogate.model, Grad::frozen));
        Var loss = misclassification_loss(q, attacker_ids, target_ids);
        if (use_feature_loss) {
            loss = total_loss(loss, hiding_feature_loss(x_a, ctx.state.pretend_features), cfg.alpha);
        }
        adam.zero_grad();
        tape.backward(loss);
        adam.step();

        TrainOptions eval_opts = sur_opts;
        eval_opts.epochs = cfg.evaluator_epochs;
        eval_opts.seed = derive_seed(cfg.seed, "evaluator", e);
        const TrainResult evaluator =
            train_surrogate(a_hat, feats, pg.graph.labels(), g.num_classes(), train_ids, split.val, eval_opts);
        const double acc = target_class_accuracy(gcn_predict(*a_hat, feats, evaluator.model),
                                                 pg.graph.labels(), split.test, cfg.target_class);

        EpochRecord rec{epoch, loss.scalar(), acc, tau};
        result.history.push_back(rec);
        log().info("epoch {} loss {:.6f} target accuracy {:.4f} tau {:.3f}", epoch, rec.loss, acc, tau);
        if (on_epoch) {
            on_epoch(rec);
        }
        if (acc < best_accuracy) {
            best_accuracy = acc;
            result.poisoned = std::move(pg);
            result.poisoned.selected_epoch = epoch;
        }
    }

    PoisonedGraph& out = result.poisoned;
    out.method = cfg.hide ? "nicki-hide" : "nicki";
    out.target_class = cfg.target_class;
    out.base_class = cfg.base_class;
    out.split = split;
    for (const auto& rec : result.history) {
        out.accuracy_history.push_back(rec.target_accuracy);
        out.loss_history.push_back(rec.loss);
    }
    return result;
}

} // namespace nicki
