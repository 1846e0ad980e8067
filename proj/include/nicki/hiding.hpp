#pragma once

#include "nicki/cvae.hpp"
#include "nicki/poison.hpp"
#include "nicki/random.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <vector>

namespace nicki {

/// Integer degree sampler fitted to the base class.
///
/// Draws from a continuous power law x^−γ truncated to [lo, hi + 1) by
/// inverse CDF and floors the result, so samples lie in [lo, hi] with
/// lo = ⌊d_μ⌋ + 1 and hi the largest base degree. When the fit is degenerate
/// (a single distinct degree, or no base degree above d_μ) it falls back to
/// drawing an observed base degree uniformly and clamping it to at least lo.
struct DegreeSampler {
    double exponent = 0.0;
    double mean_degree = 0.0;
    Index lo = 1;
    Index hi = 1;
    bool uniform_fallback = false;
    std::vector<Index> observed;

    Index sample(Rng& rng) const;
};

DegreeSampler fit_base_degree_sampler(const std::vector<Index>& base_degrees);

struct PretendEdges {
    // (base node, attacker) in global ids.
    std::vector<Edge> edges;
    std::vector<Index> sampled_degrees;
};

/// For each attacker draws dᵢ from `sampler` and attaches ⌈frac·dᵢ⌉ distinct
/// base nodes chosen without replacement with probability proportional to
/// their degree. `attackers` are global ids; `base_degrees[j]` is the degree
/// of `base_nodes[j]`.
PretendEdges sample_pretend_edges(const std::vector<Index>& attackers,
                                  const std::vector<Index>& base_nodes,
                                  const std::vector<Index>& base_degrees,
                                  const DegreeSampler& sampler, double frac, std::uint64_t seed);

/// k decoder samples for class `base_class`. Discrete graphs threshold at
/// `delta` (entry is 1 when the decoder output exceeds it); continuous
/// graphs map [0, 1] back onto the model's column ranges.
Matrix generate_pretend_features(const CvaeModel& cvae, int base_class, Index k, double delta,
                                 std::uint64_t seed);

/// Writes pretend edges into B, removes them from the edge candidates and
/// records `pf` as the feature hiding target (X_A starts at `pf`).
void apply_hiding(const Graph& g, int base_class, PoisonState& state, const PretendEdges& pe,
                  const Matrix& pf);

struct HidingOptions {
    double internal_degree_frac = 0.7;
    double feature_threshold = 0.1;
    CvaeOptions cvae;
    std::uint64_t seed = 0;
};

struct HidingResult {
    DegreeSampler sampler;
    PretendEdges pretend_edges;
    Matrix pretend_features;
};

/// Full hiding preprocessing: fit degree sampler on the base class, sample
/// pretend edges, train a CVAE on training-set features, sample pretend
/// features and apply both to `state`.
HidingResult run_hiding(const Graph& g, const Split& split, int base_class, PoisonState& state,
                        const HidingOptions& options);

nlohmann::json hiding_manifest(const HidingResult& result);

} // namespace nicki
