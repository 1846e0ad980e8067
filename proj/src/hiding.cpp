#include "nicki/hiding.hpp"

#include "nicki/errors.hpp"
#include "nicki/log.hpp"
#include "nicki/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nicki {

Index DegreeSampler::sample(Rng& rng) const
{
    if (uniform_fallback) {
        const Index d = observed[rng.index(observed.size())];
        return std::max(d, lo);
    }
    const double u = rng.uniform();
    const double a = static_cast<double>(lo);
    const double b = static_cast<double>(hi + 1);
    double x = 0.0;
    if (std::abs(exponent - 1.0) < 1e-12) {
        x = a * std::pow(b / a, u);
    } else {
        const double e = 1.0 - exponent;
        const double pa = std::pow(a, e);
        const double pb = std::pow(b, e);
        x = std::pow(pa + u * (pb - pa), 1.0 / e);
    }
    return std::clamp(static_cast<Index>(std::floor(x)), lo, hi);
}

DegreeSampler fit_base_degree_sampler(const std::vector<Index>& base_degrees)
{
    if (base_degrees.empty()) {
        throw ContractError("fit_base_degree_sampler: base class is empty");
    }
    if (base_degrees.size() < 5) {
        log().warn("fit_base_degree_sampler: only {} base nodes", base_degrees.size());
    }
    DegreeSampler s;
    s.observed = base_degrees;
    const double total = std::accumulate(base_degrees.begin(), base_degrees.end(), 0.0);
    s.mean_degree = total / static_cast<double>(base_degrees.size());
    s.lo = static_cast<Index>(std::floor(s.mean_degree)) + 1;
    s.hi = *std::max_element(base_degrees.begin(), base_degrees.end());

    Eigen::VectorXd deg(static_cast<Index>(base_degrees.size()));
    for (std::size_t i = 0; i < base_degrees.size(); ++i) {
        deg(static_cast<Index>(i)) = static_cast<double>(base_degrees[i]);
    }
    try {
        s.exponent = powerlaw_exponent(deg);
    } catch (const NumericError&) {
        s.uniform_fallback = true;
    }
    if (s.hi < s.lo || !std::isfinite(s.exponent)) {
        s.uniform_fallback = true;
    }
    if (s.uniform_fallback) {
        log().warn("fit_base_degree_sampler: degenerate base degrees, sampling observed degrees");
    }
    return s;
}

PretendEdges sample_pretend_edges(const std::vector<Index>& attackers,
                                  const std::vector<Index>& base_nodes,
                                  const std::vector<Index>& base_degrees,
                                  const DegreeSampler& sampler, double frac, std::uint64_t seed)
{
    if (!(frac > 0.0) || frac > 1.0) {
        throw ParameterError("sample_pretend_edges: fraction must lie in (0, 1]");
    }
    if (base_nodes.size() != base_degrees.size()) {
        throw DimensionError("sample_pretend_edges: one degree per base node required");
    }
    if (base_nodes.empty()) {
        throw ContractError("sample_pretend_edges: no base nodes");
    }
    Rng rng(seed);
    PretendEdges pe;
    for (Index attacker : attackers) {
        const Index d = sampler.sample(rng);
        pe.sampled_degrees.push_back(d);
        auto count = static_cast<Index>(std::ceil(frac * static_cast<double>(d) - 1e-9));
        if (count > static_cast<Index>(base_nodes.size())) {
            log().warn("sample_pretend_edges: {} pretend edges requested but only {} base nodes",
                       count, base_nodes.size());
            count = static_cast<Index>(base_nodes.size());
        }
        std::vector<double> weight(base_degrees.begin(), base_degrees.end());
        for (Index e = 0; e < count; ++e) {
            double total = 0.0;
            for (double w : weight) {
                total += std::max(w, 0.0);
            }
            std::size_t pick = 0;
            if (total <= 0.0) {
                // Only zero-degree candidates remain: choose uniformly among unpicked ones.
                std::vector<std::size_t> left;
                for (std::size_t j = 0; j < weight.size(); ++j) {
                    if (weight[j] >= 0.0) {
                        left.push_back(j);
                    }
                }
                pick = left[rng.index(left.size())];
            } else {
                double r = rng.uniform() * total;
                pick = weight.size() - 1;
                for (std::size_t j = 0; j < weight.size(); ++j) {
                    if (weight[j] <= 0.0) {
                        continue;
                    }
                    if (r < weight[j]) {
                        pick = j;
                        break;
                    }
                    r -= weight[j];
                }
                while (weight[pick] <= 0.0) {
                    --pick;
                }
            }
            pe.edges.emplace_back(base_nodes[pick], attacker);
            // −1 marks a chosen node; it is skipped by both branches above.
            weight[pick] = -1.0;
        }
    }
    return pe;
}

Matrix generate_pretend_features(const CvaeModel& cvae, int base_class, Index k, double delta,
                                 std::uint64_t seed)
{
    Matrix raw = cvae_sample(cvae, base_class, k, seed);
    if (cvae.kind == FeatureKind::continuous) {
        Eigen::RowVectorXd span = cvae.col_max - cvae.col_min;
        return (raw.array().rowwise() * span.array()).rowwise() + cvae.col_min.array();
    }
    return (raw.array() > delta).cast<double>();
}

void apply_hiding(const Graph& g, int base_class, PoisonState& state, const PretendEdges& pe,
                  const Matrix& pf)
{
    const Index n = g.num_nodes();
    for (const auto& [base, attacker] : pe.edges) {
        if (base < 0 || base >= n || g.labels()[static_cast<std::size_t>(base)] != base_class) {
            throw ContractError("apply_hiding: pretend edge endpoint " + std::to_string(base) +
                                " is not a base-class node");
        }
        if (attacker < n || attacker >= n + state.k) {
            throw ContractError("apply_hiding: pretend edge does not end at an attacker");
        }
        const Index a = attacker - n;
        state.b(base, a) = 1.0;
        // Position of (base, attacker) in the canonical candidate order.
        state.edge_candidates[static_cast<std::size_t>(a * n + base)] = false;
    }
    state.pretend_edges.insert(state.pretend_edges.end(), pe.edges.begin(), pe.edges.end());
    if (pf.size() > 0) {
        if (pf.rows() != state.k || pf.cols() != state.x_a.cols()) {
            throw DimensionError("apply_hiding: pretend features must be k×D");
        }
        state.x_a = pf;
        state.pretend_features = pf;
    }
}

HidingResult run_hiding(const Graph& g, const Split& split, int base_class, PoisonState& state,
                        const HidingOptions& options)
{
    const std::vector<Index> base_nodes = g.nodes_of_class(base_class);
    const std::vector<Index> all_degrees = g.degrees();
    std::vector<Index> base_degrees;
    for (Index v : base_nodes) {
        base_degrees.push_back(all_degrees[static_cast<std::size_t>(v)]);
    }
    HidingResult r;
    r.sampler = fit_base_degree_sampler(base_degrees);
    std::vector<Index> attackers;
    for (Index a = 0; a < state.k; ++a) {
        attackers.push_back(state.n + a);
    }
    r.pretend_edges = sample_pretend_edges(attackers, base_nodes, base_degrees, r.sampler,
                                           options.internal_degree_frac,
                                           derive_seed(options.seed, "hiding.edges"));
    if (g.has_features()) {
        Matrix x(static_cast<Index>(split.train.size()), g.feature_dim());
        std::vector<int> labels;
        for (std::size_t i = 0; i < split.train.size(); ++i) {
            x.row(static_cast<Index>(i)) = g.features().row(split.train[i]);
            labels.push_back(g.labels()[static_cast<std::size_t>(split.train[i])]);
        }
        CvaeOptions cvae_options = options.cvae;
        cvae_options.seed = derive_seed(options.seed, "hiding.cvae");
        const auto trained = cvae_train(x, labels, g.num_classes(), g.feature_kind(), cvae_options);
        r.pretend_features = generate_pretend_features(trained.model, base_class, state.k,
                                                       options.feature_threshold,
                                                       derive_seed(options.seed, "hiding.features"));
    }
    apply_hiding(g, base_class, state, r.pretend_edges, r.pretend_features);
    return r;
}

nlohmann::json hiding_manifest(const HidingResult& result)
{
    nlohmann::json j;
    j["sampler"] = {{"exponent", result.sampler.exponent},
                    {"mean_degree", result.sampler.mean_degree},
                    {"lo", result.sampler.lo},
                    {"hi", result.sampler.hi},
                    {"uniform_fallback", result.sampler.uniform_fallback}};
    j["sampled_degrees"] = result.pretend_edges.sampled_degrees;
    auto edges = nlohmann::json::array();
    for (const auto& [u, v] : result.pretend_edges.edges) {
        edges.push_back({u, v});
    }
    j["pretend_edges"] = edges;
    std::vector<double> density;
    const Matrix& pf = result.pretend_features;
    for (Index i = 0; i < pf.rows(); ++i) {
        density.push_back(pf.cols() > 0 ? (pf.row(i).array() != 0.0).cast<double>().mean() : 0.0);
    }
    j["pretend_feature_density"] = density;
    return j;
}

} // namespace nicki
