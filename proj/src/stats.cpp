#include "nicki/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nicki {

namespace {

std::vector<std::vector<Index>> adjacency_lists(Index n, const std::vector<Edge>& edges)
{
    std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
    for (const auto& [u, v] : edges) {
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
    }
    return adj;
}

std::int64_t count_triangles(const std::vector<std::vector<Index>>& adj)
{
    // Each triangle u < v < w is counted once at its lowest edge (u, v).
    std::int64_t total = 0;
    for (std::size_t u = 0; u < adj.size(); ++u) {
        for (Index v : adj[u]) {
            if (v <= static_cast<Index>(u)) {
                continue;
            }
            const auto& nu = adj[u];
            const auto& nv = adj[static_cast<std::size_t>(v)];
            auto a = std::upper_bound(nu.begin(), nu.end(), v);
            auto b = std::upper_bound(nv.begin(), nv.end(), v);
            while (a != nu.end() && b != nv.end()) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
                    ++total;
                    ++a;
                    ++b;
                }
            }
        }
    }
    return total;
}

} // namespace

SparseMatrix normalized_adjacency(Index n, const std::vector<Edge>& edges)
{
    std::vector<double> deg(static_cast<std::size_t>(n), 1.0);
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n || u == v) {
            throw DimensionError("normalized_adjacency: invalid edge");
        }
        deg[static_cast<std::size_t>(u)] += 1.0;
        deg[static_cast<std::size_t>(v)] += 1.0;
    }
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(2 * edges.size() + static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        entries.emplace_back(i, i, 1.0 / deg[static_cast<std::size_t>(i)]);
    }
    for (const auto& [u, v] : edges) {
        const double w = 1.0 / std::sqrt(deg[static_cast<std::size_t>(u)] * deg[static_cast<std::size_t>(v)]);
        entries.emplace_back(u, v, w);
        entries.emplace_back(v, u, w);
    }
    SparseMatrix out(n, n);
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

std::int64_t triangle_count(const Graph& g)
{
    return count_triangles(adjacency_lists(g.num_nodes(), g.edges()));
}

std::int64_t triangle_count(const Matrix& adjacency)
{
    if (adjacency.rows() != adjacency.cols()) {
        throw DimensionError("triangle_count: adjacency must be square");
    }
    std::vector<Edge> edges;
    for (Index i = 0; i < adjacency.rows(); ++i) {
        for (Index j = i + 1; j < adjacency.cols(); ++j) {
            if (adjacency(i, j) != 0.0) {
                edges.emplace_back(i, j);
            }
        }
    }
    return count_triangles(adjacency_lists(adjacency.rows(), edges));
}

Eigen::VectorXd degree_vector(const Graph& g)
{
    const auto deg = g.degrees();
    Eigen::VectorXd out(static_cast<Index>(deg.size()));
    for (std::size_t i = 0; i < deg.size(); ++i) {
        out(static_cast<Index>(i)) = static_cast<double>(deg[i]);
    }
    return out;
}

StatsReport graph_stats(const Graph& g)
{
    const Eigen::VectorXd deg = degree_vector(g);
    StatsReport r;
    r.gini = gini_coefficient(deg);
    r.entropy = degree_entropy(deg);
    try {
        r.powerlaw_exponent = powerlaw_exponent(deg);
    } catch (const NumericError&) {
        r.powerlaw_exponent = std::numeric_limits<double>::quiet_NaN();
    }
    r.triangle_count = triangle_count(g);
    r.avg_degree = g.average_degree();
    return r;
}

double cosine_similarity(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                         const Eigen::Ref<const Eigen::RowVectorXd>& b)
{
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

SimilarityHistogram edge_similarity_distribution(const Graph& g)
{
    if (!g.has_features()) {
        throw ContractError("edge_similarity_distribution: graph has no features");
    }
    SimilarityHistogram h;
    h.counts.assign(SimilarityHistogram::kBins, 0);
    const Matrix& x = g.features();
    for (const auto& [u, v] : g.edges()) {
        const double s = cosine_similarity(x.row(u), x.row(v));
        h.values.push_back(s);
        int bin = static_cast<int>(std::floor((s + 1.0) / 2.0 * SimilarityHistogram::kBins));
        bin = std::clamp(bin, 0, SimilarityHistogram::kBins - 1);
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

} // namespace nicki
