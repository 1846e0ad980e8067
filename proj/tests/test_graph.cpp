#include "nicki/errors.hpp"
#include "nicki/graph.hpp"
#include "nicki/stats.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace nicki;
using nicki::testing::six_node_graph;

namespace {

std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("nicki_test_graph_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p);
    out << text;
}

// Brute-force triangle count over every node triple.
std::int64_t triangles_by_triples(const Matrix& a)
{
    std::int64_t t = 0;
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = i + 1; j < a.rows(); ++j) {
            for (Index k = j + 1; k < a.rows(); ++k) {
                t += a(i, j) > 0 && a(j, k) > 0 && a(i, k) > 0;
            }
        }
    }
    return t;
}

// Mean absolute difference over all ordered pairs, halved and divided by the mean.
double gini_pairwise(const std::vector<double>& x)
{
    double diff = 0.0;
    double total = 0.0;
    for (double a : x) {
        total += a;
        for (double b : x) {
            diff += std::abs(a - b);
        }
    }
    const double n = static_cast<double>(x.size());
    return diff / (2.0 * n * total);
}

} // namespace

TEST(Graph, DropsSelfLoopsAndDuplicates)
{
    Graph g(4, {{0, 1}, {1, 0}, {2, 2}, {3, 1}, {0, 1}}, Matrix(), FeatureKind::none, {0, 1, 0, 1});
    EXPECT_EQ(g.num_edges(), 2);
    EXPECT_EQ(g.dropped_edges(), 3);
    EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {1, 3}}));
    EXPECT_EQ(g.adjacency().trace(), 0.0);
    EXPECT_TRUE(g.adjacency().isApprox(g.adjacency().transpose()));
    EXPECT_EQ(g.degrees(), (std::vector<Index>{1, 2, 0, 1}));
    EXPECT_DOUBLE_EQ(g.average_degree(), 1.0);
}

TEST(Graph, RejectsInconsistentInputs)
{
    EXPECT_THROW(Graph(3, {}, Matrix(), FeatureKind::none, {0, 1}), DimensionError);
    EXPECT_THROW(Graph(2, {{0, 5}}, Matrix(), FeatureKind::none, {0, 1}), ParameterError);
    EXPECT_THROW(Graph(2, {}, Matrix::Zero(3, 2), FeatureKind::discrete, {0, 1}), DimensionError);
    EXPECT_THROW(Graph(2, {}, Matrix(), FeatureKind::none, {0, 4}, 2), ParameterError);
}

TEST(Graph, ClassQueries)
{
    const Graph g = six_node_graph();
    EXPECT_EQ(g.num_classes(), 2);
    EXPECT_EQ(g.nodes_of_class(1), (std::vector<Index>{3, 4, 5}));
    EXPECT_EQ(g.class_sizes(), (std::vector<Index>{3, 3}));
}

TEST(GraphIo, SaveLoadRoundTrip)
{
    const Graph g = six_node_graph();
    const auto dir = scratch_dir("roundtrip");
    save_graph_dir(g, dir);
    const Graph h = load_graph_dir(dir);
    EXPECT_EQ(h.edges(), g.edges());
    EXPECT_EQ(h.labels(), g.labels());
    EXPECT_EQ(h.feature_kind(), FeatureKind::discrete);
    EXPECT_EQ(h.features(), g.features());
}

TEST(GraphIo, ContinuousFeaturesRoundTripExactly)
{
    Matrix x(2, 2);
    x << 0.1, -3.25e-7, 1.0 / 3.0, 12345.678;
    const Graph g(2, {{0, 1}}, x, FeatureKind::continuous, {0, 1});
    const auto dir = scratch_dir("continuous");
    save_graph_dir(g, dir);
    EXPECT_EQ(load_graph_dir(dir).features(), x);
}

TEST(GraphIo, FeaturelessGraphHasNoFeatureFile)
{
    const Graph g(3, {{0, 1}}, Matrix(), FeatureKind::none, {0, 0, 1});
    const auto dir = scratch_dir("featureless");
    save_graph_dir(g, dir);
    EXPECT_FALSE(std::filesystem::exists(dir / "features.txt"));
    const Graph h = load_graph_dir(dir);
    EXPECT_FALSE(h.has_features());
    EXPECT_EQ(h.num_nodes(), 3);
}

TEST(GraphIo, ReportsFileAndLine)
{
    const auto dir = scratch_dir("bad");
    write_file(dir / "labels.txt", "0\n1\n0\n");
    write_file(dir / "edges.tsv", "0\t1\n1\tx\n");
    try {
        load_graph_dir(dir);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("edges.tsv:2"), std::string::npos);
    }
}

TEST(GraphIo, RejectsEdgesBeyondLabels)
{
    const auto dir = scratch_dir("beyond");
    write_file(dir / "labels.txt", "0\n1\n");
    write_file(dir / "edges.tsv", "0\t2\n");
    EXPECT_THROW(load_graph_dir(dir), ParseError);
}

TEST(GraphIo, RejectsNonBinaryDiscreteFeatures)
{
    const auto dir = scratch_dir("nonbinary");
    write_file(dir / "labels.txt", "0\n1\n");
    write_file(dir / "edges.tsv", "0\t1\n");
    write_file(dir / "features.txt", "2 2 discrete\n1 0\n0 0.5\n");
    EXPECT_THROW(load_graph_dir(dir), ParseError);
}

TEST(GraphIo, RejectsFeatureRowCountMismatch)
{
    const auto dir = scratch_dir("rowcount");
    write_file(dir / "labels.txt", "0\n1\n1\n");
    write_file(dir / "edges.tsv", "0\t1\n");
    write_file(dir / "features.txt", "3 2 discrete\n1 0\n0 1\n");
    EXPECT_THROW(load_graph_dir(dir), ParseError);
}

TEST(GraphIo, MissingFileThrows)
{
    EXPECT_THROW(load_graph_dir(scratch_dir("empty")), ParseError);
}

// ---------------------------------------------------------------------------
// Splits

TEST(Split, ProportionsAndDisjointness)
{
    SbmOptions o;
    o.sizes = {120, 80, 50};
    const Graph g = sbm_generate(o);
    const Split s = split_nodes(g, {0.1, 0.1, 0.8}, 7);
    EXPECT_EQ(s.train.size(), 25u);
    EXPECT_EQ(s.val.size(), 25u);
    EXPECT_EQ(s.test.size(), 200u);
    std::set<Index> all(s.train.begin(), s.train.end());
    all.insert(s.val.begin(), s.val.end());
    all.insert(s.test.begin(), s.test.end());
    EXPECT_EQ(all.size(), 250u);

    // per-class train counts are floor or ceil of the class share
    std::vector<Index> per_class(3, 0);
    for (Index i : s.train) {
        ++per_class[static_cast<std::size_t>(g.labels()[static_cast<std::size_t>(i)])];
    }
    const std::vector<double> share = {12.0, 8.0, 5.0};
    for (std::size_t c = 0; c < 3; ++c) {
        EXPECT_LE(std::abs(static_cast<double>(per_class[c]) - share[c]), 1.0);
    }
}

TEST(Split, DeterministicPerSeed)
{
    const Graph g = sbm_generate(SbmOptions{});
    const Split a = split_nodes(g, {0.1, 0.1, 0.8}, 3);
    const Split b = split_nodes(g, {0.1, 0.1, 0.8}, 3);
    const Split c = split_nodes(g, {0.1, 0.1, 0.8}, 4);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    EXPECT_NE(a.train, c.train);
}

TEST(Split, RejectsBadFractions)
{
    const Graph g = six_node_graph();
    EXPECT_THROW(split_nodes(g, {0.5, 0.5, 0.5}, 1), ParameterError);
    EXPECT_THROW(split_nodes(g, {0.0, 0.5, 0.5}, 1), ParameterError);
}

// ---------------------------------------------------------------------------
// Synthetic generators

TEST(Sbm, ShapesAndHomophily)
{
    SbmOptions o;
    o.sizes = {100, 100};
    o.p_in = 0.1;
    o.p_out = 0.01;
    const Graph g = sbm_generate(o);
    EXPECT_EQ(g.num_nodes(), 200);
    EXPECT_EQ(g.feature_dim(), 64);
    Index same = 0;
    for (const auto& [u, v] : g.edges()) {
        same += g.labels()[static_cast<std::size_t>(u)] == g.labels()[static_cast<std::size_t>(v)];
    }
    // expected intra share: 2·C(100,2)·0.1 / (that + 100²·0.01) ≈ 0.91
    EXPECT_GT(static_cast<double>(same) / static_cast<double>(g.num_edges()), 0.85);
    const double expected_edges = 2 * 4950 * 0.1 + 10000 * 0.01;
    EXPECT_NEAR(static_cast<double>(g.num_edges()), expected_edges, 4 * std::sqrt(expected_edges));
}

TEST(Sbm, DeterministicAndBinary)
{
    const Graph a = sbm_generate(SbmOptions{});
    const Graph b = sbm_generate(SbmOptions{});
    EXPECT_EQ(a.edges(), b.edges());
    EXPECT_EQ(a.features(), b.features());
    EXPECT_TRUE((a.features().array() == 0.0 || a.features().array() == 1.0).all());
}

TEST(Sbm, RejectsInvalidOptions)
{
    SbmOptions o;
    o.p_in = 0.001;
    EXPECT_THROW(sbm_generate(o), ParameterError);
    o = SbmOptions{};
    o.sizes = {};
    EXPECT_THROW(sbm_generate(o), ParameterError);
}

TEST(ErdosRenyi, EdgeCountNearExpectation)
{
    const Graph g = erdos_renyi(300, 0.02, 5);
    const double expected = 0.02 * 300 * 299 / 2.0;
    EXPECT_NEAR(static_cast<double>(g.num_edges()), expected, 4 * std::sqrt(expected));
}

// ---------------------------------------------------------------------------
// Statistics

TEST(Stats, NormalizedAdjacencyOfSingleEdge)
{
    Matrix a(2, 2);
    a << 0, 1, 1, 0;
    const Matrix n = normalized_adjacency(a);
    EXPECT_NEAR(n(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(n(0, 1), 0.5, 1e-12);
}

TEST(Stats, NormalizedAdjacencyOfPath)
{
    // path 0-1-2: degrees with self loop are 2, 3, 2
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = a(1, 0) = a(1, 2) = a(2, 1) = 1;
    const Matrix n = normalized_adjacency(a);
    EXPECT_NEAR(n(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(n(1, 1), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(n(0, 1), 1.0 / std::sqrt(6.0), 1e-12);
    EXPECT_NEAR(n(0, 2), 0.0, 1e-12);
}

TEST(Stats, SparseNormalizationMatchesDense)
{
    const Graph g = sbm_generate(SbmOptions{});
    const Matrix dense = normalized_adjacency(g.adjacency());
    const Matrix sparse = Matrix(normalized_adjacency(g.num_nodes(), g.edges()));
    EXPECT_LT((dense - sparse).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Stats, NormalizedAdjacencySymmetricWithUnitSpectralRadius)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Graph g = erdos_renyi(25, 0.2, seed);
        const Matrix n = normalized_adjacency(g.adjacency());
        EXPECT_LT((n - n.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        Eigen::VectorXd v = Eigen::VectorXd::Ones(n.rows());
        double lambda = 0.0;
        for (int it = 0; it < 500; ++it) {
            Eigen::VectorXd w = n * v;
            lambda = w.norm() / v.norm();
            v = w / w.norm();
        }
        EXPECT_LE(lambda, 1.0 + 1e-9);
    }
}

TEST(Stats, GiniMatchesPairwiseDefinition)
{
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(2 + rng.index(40));
        for (double& v : x) {
            v = static_cast<double>(rng.index(20));
        }
        x[0] += 1.0;
        const Eigen::Map<const Eigen::VectorXd> m(x.data(), static_cast<Index>(x.size()));
        EXPECT_NEAR(gini_coefficient(m), gini_pairwise(x), 1e-12);
    }
}

TEST(Stats, GiniExtremes)
{
    EXPECT_DOUBLE_EQ(gini_coefficient(Eigen::VectorXd::Constant(10, 3.0)), 0.0);
    Eigen::VectorXd one_hot = Eigen::VectorXd::Zero(10);
    one_hot(4) = 7.0;
    EXPECT_NEAR(gini_coefficient(one_hot), 0.9, 1e-12);
    EXPECT_THROW(gini_coefficient(Eigen::VectorXd()), ParameterError);
}

TEST(Stats, EntropyOfHistogram)
{
    Eigen::VectorXd v(4);
    v << 1, 1, 2, 2;
    EXPECT_NEAR(degree_entropy(v, false), std::log(2.0), 1e-12);
    EXPECT_NEAR(degree_entropy(v, true), std::log(2.0) / std::log(4.0), 1e-12);
    EXPECT_DOUBLE_EQ(degree_entropy(Eigen::VectorXd::Constant(5, 3.0)), 0.0);
}

TEST(Stats, PowerLawExponentFromParetoSample)
{
    // inverse CDF of p(x) ∝ x^-2 on [1, ∞): x = 1/u
    Rng rng(31);
    Eigen::VectorXd x(20000);
    for (Index i = 0; i < x.size(); ++i) {
        x(i) = 1.0 / rng.uniform();
    }
    EXPECT_NEAR(powerlaw_exponent(x), 2.0, 0.1);
}

TEST(Stats, PowerLawExponentSteeperTail)
{
    // p(x) ∝ x^-3: x = u^(-1/2)
    Rng rng(32);
    Eigen::VectorXd x(20000);
    for (Index i = 0; i < x.size(); ++i) {
        x(i) = std::pow(rng.uniform(), -0.5);
    }
    EXPECT_NEAR(powerlaw_exponent(x), 3.0, 0.15);
}

TEST(Stats, PowerLawNeedsTwoDistinctDegrees)
{
    EXPECT_THROW(powerlaw_exponent(Eigen::VectorXd::Constant(4, 2.0)), NumericError);
}

TEST(Stats, TrianglesOfHandFixture)
{
    // two triangles sharing edge 1-2 plus a pendant: {0,1,2}, {1,2,3}
    Graph g(5, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {3, 4}}, Matrix(), FeatureKind::none, {0, 0, 0, 0, 0});
    EXPECT_EQ(triangle_count(g), 2);
    EXPECT_EQ(triangle_count(g.adjacency()), 2);
    const Graph k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, Matrix(), FeatureKind::none, {0, 0, 0, 0});
    EXPECT_EQ(triangle_count(k4), 4);
}

TEST(Stats, TrianglesMatchTraceAndBruteForce)
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Graph g = erdos_renyi(40, 0.15, seed);
        const Matrix& a = g.adjacency();
        const Matrix a3 = a * a * a;
        const auto by_trace = static_cast<std::int64_t>(std::llround(a3.trace() / 6.0));
        EXPECT_EQ(triangle_count(g), by_trace);
        EXPECT_EQ(triangle_count(g), triangles_by_triples(a));
    }
}

TEST(Stats, CosineSimilarity)
{
    Eigen::RowVectorXd a(3);
    Eigen::RowVectorXd b(3);
    a << 1, 0, 1;
    b << 1, 1, 0;
    EXPECT_NEAR(cosine_similarity(a, b), 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(cosine_similarity(a, Eigen::RowVectorXd::Zero(3)), 0.0);
}

TEST(Stats, EdgeSimilarityDistributionMatchesPairs)
{
    const Graph g = six_node_graph();
    const SimilarityHistogram h = edge_similarity_distribution(g);
    ASSERT_EQ(h.values.size(), g.edges().size());
    std::int64_t total = 0;
    for (auto c : h.counts) {
        total += c;
    }
    EXPECT_EQ(total, g.num_edges());
    for (std::size_t i = 0; i < h.values.size(); ++i) {
        const auto [u, v] = g.edges()[i];
        EXPECT_NEAR(h.values[i], cosine_similarity(g.features().row(u), g.features().row(v)), 1e-12);
    }
}

TEST(Stats, GraphStatsBundle)
{
    const Graph g = erdos_renyi(60, 0.1, 4);
    const StatsReport s = graph_stats(g);
    const Eigen::VectorXd d = degree_vector(g);
    EXPECT_DOUBLE_EQ(s.gini, gini_coefficient(d));
    EXPECT_DOUBLE_EQ(s.avg_degree, g.average_degree());
    EXPECT_EQ(s.triangle_count, triangle_count(g));
}
