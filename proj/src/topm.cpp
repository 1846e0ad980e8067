#include "nicki/topm.hpp"

#include "nicki/errors.hpp"
#include "nicki/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nicki {

namespace {

void softmax_into(const Eigen::VectorXd& s, double tau, Eigen::VectorXd& p)
{
    const double mx = s.maxCoeff();
    p = ((s.array() - mx) / tau).exp();
    p /= p.sum();
}

// One selection step: returns p and advances s in place.
void step(Eigen::VectorXd& s, double tau, Eigen::VectorXd& p)
{
    softmax_into(s, tau, p);
    s.array() += (1.0 - p.array().min(kMaxSelectProb)).log();
}

Eigen::VectorXd initial_scores(const Eigen::VectorXd& scores, const TopmOptions& options)
{
    Eigen::VectorXd s = scores;
    if (options.gumbel) {
        const auto g = gumbel_noise(static_cast<std::size_t>(s.size()), options.seed);
        for (Index i = 0; i < s.size(); ++i) {
            s(i) += g[static_cast<std::size_t>(i)];
        }
    }
    return s;
}

void check_args(Index n, Index m, const TopmOptions& options)
{
    if (!(options.tau > 0.0)) {
        throw ParameterError("topm: temperature must be positive");
    }
    if (m < 1 || m > n) {
        throw ParameterError("topm: need 1 <= m <= n, got m=" + std::to_string(m) +
                             " n=" + std::to_string(n));
    }
}

} // namespace

Eigen::VectorXd topm_select(const Eigen::VectorXd& scores, Index m, const TopmOptions& options)
{
    check_args(scores.size(), m, options);
    Eigen::VectorXd s = initial_scores(scores, options);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(s.size());
    Eigen::VectorXd p;
    for (Index i = 0; i < m; ++i) {
        step(s, options.tau, p);
        t += p;
    }
    return t;
}

Var topm(const Var& scores, Index m, const TopmOptions& options)
{
    if (scores.cols() != 1) {
        throw DimensionError("topm: scores must be a column vector");
    }
    const Index n = scores.rows();
    check_args(n, m, options);
    const double tau = options.tau;
    const Index seg = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(m))));

    Eigen::VectorXd s = initial_scores(Eigen::VectorXd(scores.value().col(0)), options);
    std::vector<Eigen::VectorXd> checkpoints;
    Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd p;
    for (Index i = 0; i < m; ++i) {
        if (i % seg == 0) {
            checkpoints.push_back(s);
        }
        step(s, tau, p);
        t += p;
    }

    Matrix out = t;
    Tape& tape = *scores.tape();
    return tape.record(std::move(out), {scores},
                       [scores, m, seg, tau, checkpoints = std::move(checkpoints)](Tape& tp,
                                                                                  const Matrix& g) {
        const Eigen::VectorXd gt = g.col(0);
        const Index n = gt.size();
        // Gradient with respect to ŝ entering the step being processed.
        Eigen::VectorXd gs = Eigen::VectorXd::Zero(n);
        std::vector<Eigen::VectorXd> probs;
        for (Index c = static_cast<Index>(checkpoints.size()) - 1; c >= 0; --c) {
            const Index begin = c * seg;
            const Index end = std::min(m, begin + seg);
            probs.clear();
            Eigen::VectorXd s = checkpoints[static_cast<std::size_t>(c)];
            Eigen::VectorXd p;
            for (Index i = begin; i < end; ++i) {
                step(s, tau, p);
                probs.push_back(p);
            }
            for (Index i = end - 1; i >= begin; --i) {
                const Eigen::VectorXd& pi = probs[static_cast<std::size_t>(i - begin)];
                // ŝ_next = ŝ + log(1 − p): ∂/∂p = −1 / (1 − p), zero where clipped.
                Eigen::VectorXd gp = gt;
                for (Index j = 0; j < n; ++j) {
                    if (pi(j) < kMaxSelectProb) {
                        gp(j) -= gs(j) / (1.0 - pi(j));
                    }
                }
                const double dot = gp.dot(pi);
                gs.array() += pi.array() * (gp.array() - dot) / tau;
            }
        }
        tp.accumulate(scores, gs);
    });
}

std::vector<Index> discretize(const Eigen::VectorXd& t, Index m)
{
    if (m < 0 || m > t.size()) {
        throw ParameterError("discretize: m outside [0, n]");
    }
    std::vector<Index> order(static_cast<std::size_t>(t.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&t](Index a, Index b) { return t(a) > t(b); });
    order.resize(static_cast<std::size_t>(m));
    std::sort(order.begin(), order.end());
    return order;
}

Eigen::VectorXd discretize_indicator(const Eigen::VectorXd& t, Index m)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(t.size());
    for (Index i : discretize(t, m)) {
        out(i) = 1.0;
    }
    return out;
}

Var mask_scores(const Var& scores, const std::vector<bool>& keep)
{
    const Matrix& v = scores.value();
    if (static_cast<Index>(keep.size()) != v.size()) {
        throw DimensionError("mask_scores: mask length differs from score count");
    }
    Matrix out = v;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (!keep[i]) {
            out.data()[i] = kMaskedScore;
        }
    }
    Tape& tape = *scores.tape();
    return tape.record(std::move(out), {scores}, [scores, keep](Tape& tp, const Matrix& g) {
        Matrix gs = g;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            if (!keep[i]) {
                gs.data()[i] = 0.0;
            }
        }
        tp.accumulate(scores, gs);
    });
}

} // namespace nicki
