#include "nicki/baselines.hpp"
#include "nicki/errors.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace nicki;
using nicki::testing::six_node_graph;

namespace {

Graph star_graph(Index leaves)
{
    std::vector<Edge> edges;
    std::vector<int> labels = {0};
    for (Index i = 1; i <= leaves; ++i) {
        edges.emplace_back(0, i);
        labels.push_back(static_cast<int>(i % 2));
    }
    Matrix x = Matrix::Zero(leaves + 1, 3);
    x.col(0).setOnes();
    return Graph(leaves + 1, edges, x, FeatureKind::discrete, labels, 2);
}

BaselineConfig config(BaselineKind kind, std::uint64_t seed = 0)
{
    BaselineConfig cfg;
    cfg.kind = kind;
    cfg.ratio = 0.1;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST(Baselines, ExactBudgetOnSbm)
{
    const Graph g = sbm_generate(SbmOptions{});
    const Split split = split_nodes(g, {0.1, 0.1, 0.8}, 1);
    for (BaselineKind kind : {BaselineKind::random, BaselineKind::preferential}) {
        const PoisonedGraph pg = run_baseline(g, split, config(kind, 3));
        const BudgetCheck c = check_budget(g, pg);
        EXPECT_EQ(c.edge_entries_added, 2 * pg.budget.delta_e) << to_string(kind);
        EXPECT_LE(c.feature_ones_added, pg.budget.delta_x);
        EXPECT_TRUE(c.original_adjacency_identical);
        EXPECT_TRUE(c.original_features_identical);
        EXPECT_EQ(pg.k, 15);
        EXPECT_EQ(pg.method, to_string(kind));
        const Matrix& a = pg.graph.adjacency();
        EXPECT_EQ(a, a.transpose());
        for (Index id : pg.injected_ids()) {
            EXPECT_EQ(pg.graph.labels()[static_cast<std::size_t>(id)], 1);
        }
    }
}

TEST(Baselines, AttackerRowsAreIdentical)
{
    const Graph g = sbm_generate(SbmOptions{});
    const Split split = split_nodes(g, {0.1, 0.1, 0.8}, 1);
    const PoisonedGraph pg = random_attack(g, split, config(BaselineKind::random));
    const Matrix x_a = pg.graph.features().bottomRows(pg.k);
    for (Index i = 1; i < pg.k; ++i) {
        EXPECT_EQ(x_a.row(i), x_a.row(0));
    }
}

TEST(Baselines, AveragedRowThresholdsAtHalf)
{
    Matrix x(4, 4);
    x << 1, 1, 0, 0,
         1, 0, 0, 0,
         1, 1, 1, 0,
         0, 0, 1, 0;
    const Graph g(4, {{0, 1}, {2, 3}}, x, FeatureKind::discrete, {0, 0, 1, 1}, 2);
    // column means 0.75, 0.5, 0.5, 0
    EXPECT_EQ(averaged_feature_row(g, 4), Eigen::RowVector4d(1, 1, 1, 0));
    EXPECT_EQ(averaged_feature_row(g, 2), Eigen::RowVector4d(1, 1, 0, 0));
}

TEST(Baselines, AveragedRowFallsBackToDensestColumns)
{
    Matrix x(4, 4);
    x << 1, 0, 0, 0,
         0, 1, 0, 0,
         1, 0, 0, 1,
         0, 0, 1, 0;
    const Graph g(4, {{0, 1}, {2, 3}}, x, FeatureKind::discrete, {0, 0, 1, 1}, 2);
    // nothing reaches 0.5; ⌊5/4⌋ = 1 entry, the densest column
    EXPECT_EQ(averaged_feature_row(g, 4), Eigen::RowVector4d(1, 0, 0, 0));
}

TEST(Baselines, ContinuousRowIsTheMean)
{
    Matrix x(2, 2);
    x << 1, -2, 3, 4;
    const Graph g(2, {{0, 1}}, x, FeatureKind::continuous, {0, 1}, 2);
    EXPECT_EQ(averaged_feature_row(g, 0), Eigen::RowVector2d(2, 1));
}

TEST(Baselines, DeterministicPerSeed)
{
    const Graph g = sbm_generate(SbmOptions{});
    const Split split = split_nodes(g, {0.1, 0.1, 0.8}, 1);
    for (BaselineKind kind : {BaselineKind::random, BaselineKind::preferential}) {
        const PoisonedGraph a = run_baseline(g, split, config(kind, 5));
        const PoisonedGraph b = run_baseline(g, split, config(kind, 5));
        const PoisonedGraph c = run_baseline(g, split, config(kind, 6));
        EXPECT_EQ(a.graph.edges(), b.graph.edges());
        EXPECT_NE(a.graph.edges(), c.graph.edges());
    }
}

TEST(Baselines, PreferentialSplitsBudgetPerNode)
{
    const Graph g = sbm_generate(SbmOptions{});
    const Split split = split_nodes(g, {0.1, 0.1, 0.8}, 1);
    const PoisonedGraph pg = preferential_attack(g, split, config(BaselineKind::preferential, 2));
    const Index per = pg.budget.delta_e / pg.k;
    const auto deg = pg.graph.degrees();
    Index total = 0;
    for (Index a = 0; a + 1 < pg.k; ++a) {
        // earlier attackers can gain edges from later ones
        EXPECT_GE(deg[static_cast<std::size_t>(pg.num_original + a)], per);
    }
    for (Index id : pg.injected_ids()) {
        total += deg[static_cast<std::size_t>(id)];
    }
    Index internal = 0;
    for (const auto& [u, v] : pg.graph.edges()) {
        internal += (u >= pg.num_original && v >= pg.num_original) ? 1 : 0;
    }
    EXPECT_EQ(total - internal, pg.budget.delta_e);
}

TEST(Baselines, PreferentialFavoursTheHub)
{
    const Graph g = star_graph(10);
    const Split split = split_nodes(g, {0.4, 0.2, 0.4}, 1);
    std::map<Index, int> hits;
    BaselineConfig cfg = config(BaselineKind::preferential);
    cfg.ratio = 0.2;
    for (std::uint64_t t = 0; t < 10000; ++t) {
        cfg.seed = t;
        const PoisonedGraph pg = preferential_attack(g, split, cfg);
        ASSERT_EQ(pg.k, 1);
        for (const auto& [u, v] : pg.graph.edges()) {
            if (v == 11) {
                ++hits[u];
            }
        }
    }
    for (Index leaf = 1; leaf <= 10; ++leaf) {
        EXPECT_GT(hits[0], 5 * hits[leaf]);
    }
    // hub holds half of the total degree
    EXPECT_NEAR(hits[0] / 10000.0, 0.5, 0.03);
}

TEST(Baselines, RandomAcceptanceProbability)
{
    // ‖A‖₀ / |V|² for a 2708-node, 6632-edge citation graph
    const double p = 2.0 * 6632.0 / (2708.0 * 2708.0);
    EXPECT_NEAR(p, 0.00181, 5e-6);
    const Graph g = star_graph(10);
    const Split split = split_nodes(g, {0.4, 0.2, 0.4}, 1);
    BaselineConfig cfg = config(BaselineKind::random);
    cfg.ratio = 0.2;
    // 20 / 121 per candidate: the first pass over 11 candidates accepts node 0 about 1/6 of the time
    int first = 0;
    for (std::uint64_t t = 0; t < 5000; ++t) {
        cfg.seed = t;
        const PoisonedGraph pg = random_attack(g, split, cfg);
        for (const auto& [u, v] : pg.graph.edges()) {
            first += v == 11 && u == 0 ? 1 : 0;
        }
    }
    const double q = 20.0 / 121.0;
    // chance that candidate 0 is the first accepted across repeated passes
    const double expected = q / (1.0 - std::pow(1.0 - q, 11.0));
    EXPECT_NEAR(first / 5000.0, expected, 0.02);
}

TEST(Baselines, ConfigErrors)
{
    const Graph g = six_node_graph();
    const Split split = split_nodes(g, {0.34, 0.33, 0.33}, 1);
    BaselineConfig cfg = config(BaselineKind::random);
    cfg.base_class = 0;
    EXPECT_THROW(run_baseline(g, split, cfg), ConfigError);
    cfg = config(BaselineKind::random);
    cfg.ratio = 0.01;
    EXPECT_THROW(run_baseline(g, split, cfg), ConfigError);
}
