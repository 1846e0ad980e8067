#pragma once

#include "nicki/poison.hpp"

#include <cstdint>
#include <string>

namespace nicki {

enum class BaselineKind { random, preferential };

std::string to_string(BaselineKind kind);

struct BaselineConfig {
    BaselineKind kind = BaselineKind::random;
    int target_class = 0;
    int base_class = 1;
    double ratio = 0.1;
    FeatureBudgetMode feature_budget = FeatureBudgetMode::per_node;
    std::uint64_t seed = 0;
};

/// Feature row shared by every baseline attacker: the mean clean row. For
/// discrete graphs the mean is thresholded at 0.5; if nothing survives, the
/// ⌊average ones per node⌋ largest means are set instead. At most
/// `max_ones` entries are kept (largest means first, ties by lower index).
Eigen::RowVectorXd averaged_feature_row(const Graph& g, Index max_ones);

/// Walks the candidate edges in canonical order, accepting each unchosen one
/// with probability p = ‖A‖₀ / |V|², and repeats passes until exactly Δe
/// edges are chosen.
PoisonedGraph random_attack(const Graph& g, const Split& split, const BaselineConfig& cfg);

/// Injects attackers one at a time; each attaches ⌊Δe/k⌋ edges (the last
/// one also takes the remainder) to distinct existing nodes drawn with
/// probability proportional to current degree, earlier attackers included.
PoisonedGraph preferential_attack(const Graph& g, const Split& split, const BaselineConfig& cfg);

PoisonedGraph run_baseline(const Graph& g, const Split& split, const BaselineConfig& cfg);

} // namespace nicki
