#pragma once

#include "nicki/tensor.hpp"

#include <cstdint>
#include <vector>

namespace nicki {

// Score assigned to entries excluded from selection.
inline constexpr double kMaskedScore = -1e9;

// Largest probability allowed inside log(1 − p).
inline constexpr double kMaxSelectProb = 1.0 - 1e-9;

struct TopmOptions {
    double tau = 1.0;
    bool gumbel = true;
    std::uint64_t seed = 0;
};

/// Relaxed m-hot selection over a score column vector.
///
/// With ŝ = s (+ Gumbel noise), repeat m times: p = softmax(ŝ / τ),
/// t += p, ŝ += log(1 − p). Scores are treated as logits. The result sums to
/// m and is nonnegative; entries exceed 1 slightly at large τ. The backward pass recomputes the per-step
/// probabilities from checkpoints every ⌈√m⌉ steps, so memory stays
/// O(√m · n).
Var topm(const Var& scores, Index m, const TopmOptions& options);

// Plain-value variant for callers without a tape.
Eigen::VectorXd topm_select(const Eigen::VectorXd& scores, Index m, const TopmOptions& options);

/// Indices of the m largest entries, ties broken by lowest index, returned
/// in ascending index order.
std::vector<Index> discretize(const Eigen::VectorXd& t, Index m);

// 0/1 vector with ones at `discretize(t, m)`.
Eigen::VectorXd discretize_indicator(const Eigen::VectorXd& t, Index m);

// Replaces entries where `keep` is false with kMaskedScore; their gradient is zero.
Var mask_scores(const Var& scores, const std::vector<bool>& keep);

} // namespace nicki
