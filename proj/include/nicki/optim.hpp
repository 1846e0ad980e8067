#pragma once

#include "nicki/tensor.hpp"

#include <vector>

namespace nicki {

struct AdamOptions {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    long step = 0;
};

/// Adam with bias correction over a fixed parameter list.
class Adam {
public:
    Adam(std::vector<Tensor> params, AdamOptions options = {});

    // Applies one update from the current gradient buffers.
    void step();
    void zero_grad();

    const AdamState& state() const { return state_; }
    const AdamOptions& options() const { return options_; }

private:
    std::vector<Tensor> params_;
    AdamOptions options_;
    AdamState state_;
};

} // namespace nicki
