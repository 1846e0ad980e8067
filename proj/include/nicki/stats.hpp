#pragma once

#include "nicki/errors.hpp"
#include "nicki/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace nicki {

/// D̂^-1/2 (A + I) D̂^-1/2 with D̂_ii = Σ_j (A + I)_ij.
template <typename Derived>
MatrixX<typename Derived::Scalar> normalized_adjacency(const Eigen::MatrixBase<Derived>& a)
{
    using Scalar = typename Derived::Scalar;
    if (a.rows() != a.cols()) {
        throw DimensionError("normalized_adjacency: adjacency must be square");
    }
    const Index n = a.rows();
    MatrixX<Scalar> with_loops = a + MatrixX<Scalar>::Identity(n, n);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dinv = with_loops.rowwise().sum().array().rsqrt();
    return dinv.asDiagonal() * with_loops * dinv.asDiagonal();
}

// Sparse D̂^-1/2 (A + I) D̂^-1/2 of an undirected edge list (each pair once).
SparseMatrix normalized_adjacency(Index n, const std::vector<Edge>& edges);

// Gini coefficient of a nonnegative sequence via the sorted-sum formula.
template <typename Derived>
double gini_coefficient(const Eigen::DenseBase<Derived>& values)
{
    const Index n = values.size();
    if (n == 0) {
        throw ParameterError("gini_coefficient: empty sequence");
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = static_cast<double>(values(i));
    }
    std::sort(x.begin(), x.end());
    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        total += x[i];
        weighted += static_cast<double>(i + 1) * x[i];
    }
    if (total == 0.0) {
        return 0.0;
    }
    const double dn = static_cast<double>(n);
    return 2.0 * weighted / (dn * total) - (dn + 1.0) / dn;
}

/// Shannon entropy (nats) of the empirical histogram of `values`, divided by
/// ln(n) when `normalize` is set and n > 1.
template <typename Derived>
double degree_entropy(const Eigen::DenseBase<Derived>& values, bool normalize = true)
{
    const Index n = values.size();
    if (n == 0) {
        throw ParameterError("degree_entropy: empty sequence");
    }
    std::map<double, Index> counts;
    for (Index i = 0; i < n; ++i) {
        ++counts[static_cast<double>(values(i))];
    }
    double h = 0.0;
    for (const auto& [value, count] : counts) {
        const double p = static_cast<double>(count) / static_cast<double>(n);
        h -= p * std::log(p);
    }
    if (normalize && n > 1) {
        h /= std::log(static_cast<double>(n));
    }
    return h;
}

/// Power-law exponent from a least-squares line through log CCDF vs log degree.
///
/// Uses degrees ≥ 1, one point per distinct degree, CCDF(d) = P(deg ≥ d).
/// Returns γ = 1 − slope, the exponent of the degree density p(d) ∝ d^-γ.
template <typename Derived>
double powerlaw_exponent(const Eigen::DenseBase<Derived>& degrees)
{
    std::map<double, Index> counts;
    Index total = 0;
    for (Index i = 0; i < degrees.size(); ++i) {
        const auto d = static_cast<double>(degrees(i));
        if (d >= 1.0) {
            ++counts[d];
            ++total;
        }
    }
    if (counts.size() < 2) {
        throw NumericError("powerlaw_exponent: need at least two distinct degrees >= 1");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    Index at_least = total;
    for (const auto& [d, c] : counts) {
        xs.push_back(std::log(d));
        ys.push_back(std::log(static_cast<double>(at_least) / static_cast<double>(total)));
        at_least -= c;
    }
    const auto m = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return 1.0 - sxy / sxx;
}

// Number of 3-cliques, by sorted neighbour-list intersection.
std::int64_t triangle_count(const Graph& g);
// Same count from a dense symmetric 0/1 matrix with zero diagonal.
std::int64_t triangle_count(const Matrix& adjacency);

struct StatsReport {
    double gini = 0.0;
    double entropy = 0.0;
    double powerlaw_exponent = 0.0;
    std::int64_t triangle_count = 0;
    double avg_degree = 0.0;
};

StatsReport graph_stats(const Graph& g);

Eigen::VectorXd degree_vector(const Graph& g);

struct SimilarityHistogram {
    static constexpr int kBins = 50;
    std::vector<double> values;                // one per edge, edge-list order
    std::vector<std::int64_t> counts;          // kBins bins over [-1, 1]
    double bin_lo(int b) const { return -1.0 + 2.0 * b / kBins; }
    double bin_hi(int b) const { return -1.0 + 2.0 * (b + 1) / kBins; }
};

// Cosine similarity of feature rows; 0 when either row is all zero.
double cosine_similarity(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                         const Eigen::Ref<const Eigen::RowVectorXd>& b);

SimilarityHistogram edge_similarity_distribution(const Graph& g);

} // namespace nicki
