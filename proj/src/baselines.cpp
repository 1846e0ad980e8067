#include "nicki/baselines.hpp"

#include "nicki/errors.hpp"
#include "nicki/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nicki {

std::string to_string(BaselineKind kind)
{
    return kind == BaselineKind::random ? "random" : "preferential";
}

Eigen::RowVectorXd averaged_feature_row(const Graph& g, Index max_ones)
{
    if (!g.has_features()) {
        return Eigen::RowVectorXd(0);
    }
    Eigen::RowVectorXd mean = g.features().colwise().mean();
    if (g.feature_kind() == FeatureKind::continuous) {
        return mean;
    }
    const Index d = mean.size();
    std::vector<Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&mean](Index a, Index b) { return mean(a) > mean(b); });

    Index ones = (mean.array() >= 0.5).count();
    if (ones == 0) {
        ones = static_cast<Index>(std::floor(g.features().sum() / static_cast<double>(g.num_nodes()) + 1e-9));
    }
    ones = std::min({ones, max_ones, d});
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(d);
    for (Index i = 0; i < ones; ++i) {
        row(order[static_cast<std::size_t>(i)]) = 1.0;
    }
    return row;
}

namespace {

struct Setup {
    Index k = 0;
    Budget budget;
    Matrix x_a;
};

Setup prepare(const Graph& g, const BaselineConfig& cfg)
{
    if (cfg.target_class == cfg.base_class) {
        throw ConfigError("target and base class must differ");
    }
    if (cfg.base_class < 0 || cfg.base_class >= g.num_classes()) {
        throw ConfigError("base class " + std::to_string(cfg.base_class) + " does not exist");
    }
    Setup s;
    s.k = injection_count(g, cfg.target_class, cfg.ratio);
    s.budget = compute_budgets(g, s.k, cfg.feature_budget);
    const Index per_node = s.budget.feature_budget_applies() ? s.budget.delta_x / s.k : g.feature_dim();
    const Eigen::RowVectorXd row = averaged_feature_row(g, per_node);
    s.x_a = row.replicate(s.k, 1);
    const Index total = candidate_pairs(g.num_nodes(), s.k).size();
    if (s.budget.delta_e > total) {
        throw ConfigError("edge budget exceeds candidate edges");
    }
    return s;
}

PoisonedGraph finish(const Graph& g, const Split& split, const BaselineConfig& cfg, const Setup& s,
                     const std::vector<Edge>& edges)
{
    PoisonedGraph pg;
    pg.graph = inject(g, s.k, edges, s.x_a, cfg.base_class);
    pg.num_original = g.num_nodes();
    pg.k = s.k;
    pg.budget = s.budget;
    pg.method = to_string(cfg.kind);
    pg.target_class = cfg.target_class;
    pg.base_class = cfg.base_class;
    pg.split = split;
    return pg;
}

} // namespace

PoisonedGraph random_attack(const Graph& g, const Split& split, const BaselineConfig& cfg)
{
    const Setup s = prepare(g, cfg);
    const Index n = g.num_nodes();
    const PairList pairs = candidate_pairs(n, s.k);
    const double p = 2.0 * static_cast<double>(g.num_edges()) / (static_cast<double>(n) * static_cast<double>(n));
    if (!(p > 0.0)) {
        throw ConfigError("random baseline: clean graph has no edges");
    }
    Rng rng(derive_seed(cfg.seed, "baseline.random"));
    std::vector<bool> taken(pairs.size(), false);
    std::vector<Edge> edges;
    while (static_cast<Index>(edges.size()) < s.budget.delta_e) {
        for (std::size_t c = 0; c < pairs.size() && static_cast<Index>(edges.size()) < s.budget.delta_e; ++c) {
            if (!taken[c] && rng.uniform() < p) {
                taken[c] = true;
                edges.push_back(pairs[c]);
            }
        }
    }
    return finish(g, split, cfg, s, edges);
}

PoisonedGraph preferential_attack(const Graph& g, const Split& split, const BaselineConfig& cfg)
{
    const Setup s = prepare(g, cfg);
    const Index n = g.num_nodes();
    const Index per_node = s.budget.delta_e / s.k;
    if (per_node < 1) {
        throw ConfigError("preferential baseline: edge budget smaller than injected node count");
    }
    Rng rng(derive_seed(cfg.seed, "baseline.preferential"));
    std::vector<double> degree(static_cast<std::size_t>(n + s.k), 0.0);
    const auto deg = g.degrees();
    for (Index i = 0; i < n; ++i) {
        degree[static_cast<std::size_t>(i)] = static_cast<double>(deg[static_cast<std::size_t>(i)]);
    }
    std::vector<Edge> edges;
    for (Index a = 0; a < s.k; ++a) {
        const Index attacker = n + a;
        const Index existing = n + a;
        Index want = a + 1 == s.k ? s.budget.delta_e - per_node * (s.k - 1) : per_node;
        if (want > existing) {
            throw ConfigError("preferential baseline: node " + std::to_string(attacker) +
                              " needs more edges than existing nodes");
        }
        std::vector<bool> picked(static_cast<std::size_t>(existing), false);
        for (Index e = 0; e < want; ++e) {
            double total = 0.0;
            for (Index j = 0; j < existing; ++j) {
                if (!picked[static_cast<std::size_t>(j)]) {
                    total += degree[static_cast<std::size_t>(j)];
                }
            }
            Index pick = -1;
            if (total > 0.0) {
                double r = rng.uniform() * total;
                for (Index j = 0; j < existing; ++j) {
                    const double w = picked[static_cast<std::size_t>(j)] ? 0.0 : degree[static_cast<std::size_t>(j)];
                    if (w <= 0.0) {
                        continue;
                    }
                    pick = j;
                    if (r < w) {
                        break;
                    }
                    r -= w;
                }
            } else {
                std::vector<Index> left;
                for (Index j = 0; j < existing; ++j) {
                    if (!picked[static_cast<std::size_t>(j)]) {
                        left.push_back(j);
                    }
                }
                pick = left[rng.index(left.size())];
            }
            picked[static_cast<std::size_t>(pick)] = true;
            edges.emplace_back(pick, attacker);
        }
        for (Index j = 0; j < existing; ++j) {
            if (picked[static_cast<std::size_t>(j)]) {
                degree[static_cast<std::size_t>(j)] += 1.0;
            }
        }
        degree[static_cast<std::size_t>(attacker)] += static_cast<double>(want);
    }
    return finish(g, split, cfg, s, edges);
}

PoisonedGraph run_baseline(const Graph& g, const Split& split, const BaselineConfig& cfg)
{
    return cfg.kind == BaselineKind::random ? random_attack(g, split, cfg)
                                            : preferential_attack(g, split, cfg);
}

} // namespace nicki
