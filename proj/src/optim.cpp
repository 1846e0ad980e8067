#include "nicki/optim.hpp"

#include "nicki/errors.hpp"

#include <cmath>

namespace nicki {

Adam::Adam(std::vector<Tensor> params, AdamOptions options)
    : params_(std::move(params)), options_(options)
{
    for (const Tensor& p : params_) {
        if (!p.defined() || !p.requires_grad()) {
            throw ContractError("Adam: every parameter must require gradients");
        }
        state_.m.push_back(Matrix::Zero(p.rows(), p.cols()));
        state_.v.push_back(Matrix::Zero(p.rows(), p.cols()));
    }
}

void Adam::step()
{
    ++state_.step;
    const double t = static_cast<double>(state_.step);
    const double c1 = 1.0 - std::pow(options_.beta1, t);
    const double c2 = 1.0 - std::pow(options_.beta2, t);
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Tensor& p = params_[i];
        const Matrix& g = p.grad();
        if (g.rows() != p.rows() || g.cols() != p.cols()) {
            throw ContractError("Adam: gradient buffer shape differs from parameter");
        }
        Matrix& m = state_.m[i];
        Matrix& v = state_.v[i];
        m = options_.beta1 * m + (1.0 - options_.beta1) * g;
        v = options_.beta2 * v + (1.0 - options_.beta2) * g.cwiseAbs2();
        p.value().array() -=
            options_.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + options_.eps);
    }
}

void Adam::zero_grad()
{
    for (Tensor& p : params_) {
        p.zero_grad();
    }
}

} // namespace nicki
