#include "nicki/tensor.hpp"

#include "nicki/errors.hpp"

#include <cmath>
#include <sstream>

namespace nicki {

namespace {

std::string shape_str(const Matrix& m)
{
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

void require_same_tape(const Var& a, const Var& b)
{
    if (!a.valid() || !b.valid() || a.tape() != b.tape()) {
        throw ContractError("operands recorded on different tapes");
    }
}

void require_same_shape(const Var& a, const Var& b, const char* op)
{
    require_same_tape(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.value()) +
                             " vs " + shape_str(b.value()));
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(Matrix value, bool requires_grad) : impl_(std::make_shared<Impl>())
{
    impl_->value = std::move(value);
    impl_->requires_grad = requires_grad;
    if (requires_grad) {
        impl_->grad = Matrix::Zero(impl_->value.rows(), impl_->value.cols());
    }
}

Tensor Tensor::zeros(Index rows, Index cols, bool requires_grad)
{
    return Tensor(Matrix::Zero(rows, cols), requires_grad);
}

const Matrix& Tensor::grad() const
{
    if (!impl_->requires_grad) {
        throw ContractError("tensor does not carry a gradient");
    }
    return impl_->grad;
}

Matrix& Tensor::grad()
{
    if (!impl_->requires_grad) {
        throw ContractError("tensor does not carry a gradient");
    }
    return impl_->grad;
}

void Tensor::zero_grad()
{
    if (impl_->requires_grad) {
        impl_->grad.setZero(impl_->value.rows(), impl_->value.cols());
    }
}

// ---------------------------------------------------------------------------
// Var / Tape

const Matrix& Var::value() const
{
    return tape_->value(*this);
}

double Var::scalar() const
{
    const Matrix& v = value();
    if (v.size() != 1) {
        throw DimensionError("scalar() on " + shape_str(v) + " value");
    }
    return v(0, 0);
}

Tape::Node& Tape::node(const Var& v)
{
    if (v.tape() != this || v.id() < 0 || static_cast<std::size_t>(v.id()) >= nodes_.size()) {
        throw ContractError("variable does not belong to this tape");
    }
    return nodes_[static_cast<std::size_t>(v.id())];
}

const Tape::Node& Tape::node(const Var& v) const
{
    if (v.tape() != this || v.id() < 0 || static_cast<std::size_t>(v.id()) >= nodes_.size()) {
        throw ContractError("variable does not belong to this tape");
    }
    return nodes_[static_cast<std::size_t>(v.id())];
}

Var Tape::leaf(const Tensor& tensor)
{
    if (!tensor.defined()) {
        throw ContractError("leaf from undefined tensor");
    }
    Node n;
    n.value = tensor.value();
    n.needs_grad = tensor.requires_grad();
    if (n.needs_grad) {
        n.sink = tensor.impl_;
    }
    nodes_.push_back(std::move(n));
    return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::constant(Matrix value)
{
    Node n;
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::record(Matrix value, const std::vector<Var>& parents, BackwardFn fn)
{
    Node n;
    n.value = std::move(value);
    for (const Var& p : parents) {
        if (node(p).needs_grad) {
            n.needs_grad = true;
        }
    }
    if (n.needs_grad) {
        n.backward = std::move(fn);
    }
    nodes_.push_back(std::move(n));
    return Var(this, static_cast<int>(nodes_.size() - 1));
}

Matrix Tape::grad(const Var& v) const
{
    const Node& n = node(v);
    if (n.grad.size() == 0) {
        return Matrix::Zero(n.value.rows(), n.value.cols());
    }
    return n.grad;
}

void Tape::backward(const Var& loss)
{
    if (consumed_) {
        throw ContractError("backward already ran on this tape; record a new tape");
    }
    Node& root = node(loss);
    if (root.value.size() != 1) {
        throw ContractError("backward requires a scalar loss, got " + shape_str(root.value));
    }
    consumed_ = true;
    if (!root.needs_grad) {
        return;
    }
    root.grad = Matrix::Ones(1, 1);
    for (int id = loss.id(); id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (n.grad.size() == 0) {
            continue;
        }
        if (n.backward) {
            n.backward(*this, n.grad);
        }
        if (n.sink) {
            n.sink->grad += n.grad;
        }
    }
}

// ---------------------------------------------------------------------------
// Elementwise and linear-algebra ops

Var matmul(const Var& a, const Var& b)
{
    require_same_tape(a, b);
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions " + shape_str(a.value()) + " · " +
                             shape_str(b.value()));
    }
    Tape& t = *a.tape();
    Matrix out = a.value() * b.value();
    return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
        if (tp.needs_grad(a)) {
            tp.accumulate(a, g * tp.value(b).transpose());
        }
        if (tp.needs_grad(b)) {
            tp.accumulate(b, tp.value(a).transpose() * g);
        }
    });
}

Var matmul(std::shared_ptr<const Matrix> a, const Var& b)
{
    if (!a || a->cols() != b.rows()) {
        throw DimensionError("matmul: constant operand does not match " + shape_str(b.value()));
    }
    Tape& t = *b.tape();
    Matrix out = (*a) * b.value();
    return t.record(std::move(out), {b}, [a, b](Tape& tp, const Matrix& g) {
        tp.accumulate(b, a->transpose() * g);
    });
}

Var matmul(std::shared_ptr<const SparseMatrix> a, const Var& b)
{
    if (!a || a->cols() != b.rows()) {
        throw DimensionError("matmul: constant operand does not match " + shape_str(b.value()));
    }
    Tape& t = *b.tape();
    Matrix out = (*a) * b.value();
    return t.record(std::move(out), {b}, [a, b](Tape& tp, const Matrix& g) {
        Matrix gb = a->transpose() * g;
        tp.accumulate(b, gb);
    });
}

Var add(const Var& a, const Var& b)
{
    require_same_shape(a, b, "add");
    Tape& t = *a.tape();
    return t.record(a.value() + b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
        tp.accumulate(a, g);
        tp.accumulate(b, g);
    });
}

Var sub(const Var& a, const Var& b)
{
    require_same_shape(a, b, "sub");
    Tape& t = *a.tape();
    return t.record(a.value() - b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
        tp.accumulate(a, g);
        tp.accumulate(b, -g);
    });
}

Var mul(const Var& a, const Var& b)
{
    require_same_shape(a, b, "mul");
    Tape& t = *a.tape();
    Matrix out = a.value().cwiseProduct(b.value());
    return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
        if (tp.needs_grad(a)) {
            tp.accumulate(a, g.cwiseProduct(tp.value(b)));
        }
        if (tp.needs_grad(b)) {
            tp.accumulate(b, g.cwiseProduct(tp.value(a)));
        }
    });
}

Var div(const Var& a, const Var& b)
{
    require_same_shape(a, b, "div");
    Tape& t = *a.tape();
    Matrix denom = b.value().array() + kEps;
    if ((denom.array() == 0.0).any()) {
        throw NumericError("div: zero denominator after guard");
    }
    Matrix out = a.value().cwiseQuotient(denom);
    return t.record(out, {a, b}, [a, b, denom, out](Tape& tp, const Matrix& g) {
        if (tp.needs_grad(a)) {
            tp.accumulate(a, g.cwiseQuotient(denom));
        }
        if (tp.needs_grad(b)) {
            tp.accumulate(b, -g.cwiseProduct(out).cwiseQuotient(denom));
        }
    });
}

Var neg(const Var& a)
{
    return scale(a, -1.0);
}

Var scale(const Var& a, double factor)
{
    Tape& t = *a.tape();
    return t.record(a.value() * factor, {a},
                    [a, factor](Tape& tp, const Matrix& g) { tp.accumulate(a, g * factor); });
}

Var add_scalar(const Var& a, double value)
{
    Tape& t = *a.tape();
    Matrix out = a.value().array() + value;
    return t.record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) { tp.accumulate(a, g); });
}

Var add_row(const Var& a, const Var& row)
{
    require_same_tape(a, row);
    if (row.rows() != 1 || row.cols() != a.cols()) {
        throw DimensionError("add_row: row " + shape_str(row.value()) + " vs " +
                             shape_str(a.value()));
    }
    Tape& t = *a.tape();
    Matrix out = a.value().rowwise() + row.value().row(0);
    return t.record(std::move(out), {a, row}, [a, row](Tape& tp, const Matrix& g) {
        tp.accumulate(a, g);
        if (tp.needs_grad(row)) {
            tp.accumulate(row, g.colwise().sum());
        }
    });
}

Var log(const Var& a)
{
    Tape& t = *a.tape();
    Matrix shifted = a.value().array() + kEps;
    if ((shifted.array() <= 0.0).any()) {
        throw NumericError("log: argument outside domain after guard");
    }
    Matrix out = shifted.array().log();
    return t.record(std::move(out), {a}, [a, shifted](Tape& tp, const Matrix& g) {
        tp.accumulate(a, g.cwiseQuotient(shifted));
    });
}

Var exp(const Var& a)
{
    Tape& t = *a.tape();
    Matrix out = a.value().array().exp();
    return t.record(out, {a},
                    [a, out](Tape& tp, const Matrix& g) { tp.accumulate(a, g.cwiseProduct(out)); });
}

Var relu(const Var& a)
{
    Tape& t = *a.tape();
    Matrix out = a.value().cwiseMax(0.0);
    return t.record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
        const Matrix& x = tp.value(a);
        tp.accumulate(a, (x.array() > 0.0).select(g, 0.0));
    });
}

Var sigmoid(const Var& a)
{
    Tape& t = *a.tape();
    Matrix out = a.value().unaryExpr([](double x) {
        return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    });
    return t.record(out, {a}, [a, out](Tape& tp, const Matrix& g) {
        tp.accumulate(a, (g.array() * out.array() * (1.0 - out.array())).matrix());
    });
}

Var tanh(const Var& a)
{
    Tape& t = *a.tape();
    Matrix out = a.value().array().tanh();
    return t.record(out, {a}, [a, out](Tape& tp, const Matrix& g) {
        tp.accumulate(a, (g.array() * (1.0 - out.array().square())).matrix());
    });
}

Var sum(const Var& a)
{
    Tape& t = *a.tape();
    Matrix out(1, 1);
    out(0, 0) = a.value().sum();
    return t.record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
        const Matrix& x = tp.value(a);
        tp.accumulate(a, Matrix::Constant(x.rows(), x.cols(), g(0, 0)));
    });
}

Var mean(const Var& a)
{
    const auto n = static_cast<double>(a.value().size());
    if (n == 0) {
        throw DimensionError("mean of empty matrix");
    }
    return scale(sum(a), 1.0 / n);
}

Var row_softmax(const Var& x, double tau)
{
    if (!(tau > 0.0)) {
        throw ParameterError("row_softmax: temperature must be positive");
    }
    Tape& t = *x.tape();
    Matrix scaled = x.value() / tau;
    Eigen::VectorXd mx = scaled.rowwise().maxCoeff();
    Matrix e = (scaled.colwise() - mx).array().exp();
    Eigen::VectorXd z = e.rowwise().sum();
    Matrix p = e.array().colwise() / z.array();
    return t.record(p, {x}, [x, p, tau](Tape& tp, const Matrix& g) {
        Eigen::VectorXd dot = g.cwiseProduct(p).rowwise().sum();
        Matrix gx = p.array() * (g.colwise() - dot).array() / tau;
        tp.accumulate(x, gx);
    });
}

Var softmax_cross_entropy(const Var& logits, const std::vector<int>& labels,
                          const std::vector<Index>& ids)
{
    if (ids.empty()) {
        throw ContractError("softmax_cross_entropy: no rows selected");
    }
    const Matrix& z = logits.value();
    Matrix p(static_cast<Index>(ids.size()), z.cols());
    double loss = 0.0;
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const Index i = ids[r];
        const int y = labels.at(static_cast<std::size_t>(i));
        if (y < 0 || y >= z.cols()) {
            throw DimensionError("softmax_cross_entropy: label outside logit columns");
        }
        const double mx = z.row(i).maxCoeff();
        Eigen::RowVectorXd e = (z.row(i).array() - mx).exp();
        const double s = e.sum();
        p.row(static_cast<Index>(r)) = e / s;
        loss -= (z(i, y) - mx) - std::log(s);
    }
    const double n = static_cast<double>(ids.size());
    Matrix out(1, 1);
    out(0, 0) = loss / n;
    Tape& t = *logits.tape();
    return t.record(std::move(out), {logits}, [logits, labels, ids, p, n](Tape& tp, const Matrix& g) {
        const Matrix& z = tp.value(logits);
        Matrix gz = Matrix::Zero(z.rows(), z.cols());
        for (std::size_t r = 0; r < ids.size(); ++r) {
            const Index i = ids[r];
            gz.row(i) += p.row(static_cast<Index>(r)) * (g(0, 0) / n);
            gz(i, labels[static_cast<std::size_t>(i)]) -= g(0, 0) / n;
        }
        tp.accumulate(logits, gz);
    });
}

// ---------------------------------------------------------------------------
// Structural ops

Var gather_rows(const Var& a, const std::vector<Index>& ids)
{
    const Matrix& x = a.value();
    Matrix out(static_cast<Index>(ids.size()), x.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        if (ids[r] < 0 || ids[r] >= x.rows()) {
            throw DimensionError("gather_rows: row index out of range");
        }
        out.row(static_cast<Index>(r)) = x.row(ids[r]);
    }
    Tape& t = *a.tape();
    return t.record(std::move(out), {a}, [a, ids](Tape& tp, const Matrix& g) {
        const Matrix& x = tp.value(a);
        Matrix ga = Matrix::Zero(x.rows(), x.cols());
        for (std::size_t r = 0; r < ids.size(); ++r) {
            ga.row(ids[r]) += g.row(static_cast<Index>(r));
        }
        tp.accumulate(a, ga);
    });
}

Var slice_rows(const Var& a, Index start, Index count)
{
    if (start < 0 || count < 0 || start + count > a.rows()) {
        throw DimensionError("slice_rows: range out of bounds");
    }
    Tape& t = *a.tape();
    Matrix out = a.value().middleRows(start, count);
    return t.record(std::move(out), {a}, [a, start, count](Tape& tp, const Matrix& g) {
        const Matrix& x = tp.value(a);
        Matrix ga = Matrix::Zero(x.rows(), x.cols());
        ga.middleRows(start, count) = g;
        tp.accumulate(a, ga);
    });
}

Var mean_rows(const Var& a, const std::vector<Index>& ids)
{
    if (ids.empty()) {
        throw ContractError("mean_rows: empty row set");
    }
    const double inv = 1.0 / static_cast<double>(ids.size());
    const Matrix& x = a.value();
    Matrix out = Matrix::Zero(1, x.cols());
    for (Index i : ids) {
        if (i < 0 || i >= x.rows()) {
            throw DimensionError("mean_rows: row index out of range");
        }
        out += x.row(i);
    }
    out *= inv;
    Tape& t = *a.tape();
    return t.record(std::move(out), {a}, [a, ids, inv](Tape& tp, const Matrix& g) {
        const Matrix& x = tp.value(a);
        Matrix ga = Matrix::Zero(x.rows(), x.cols());
        for (Index i : ids) {
            ga.row(i) += g.row(0) * inv;
        }
        tp.accumulate(a, ga);
    });
}

Var vstack(const Var& top, const Var& bottom)
{
    require_same_tape(top, bottom);
    if (top.cols() != bottom.cols()) {
        throw DimensionError("vstack: column mismatch");
    }
    Matrix out(top.rows() + bottom.rows(), top.cols());
    out << top.value(), bottom.value();
    const Index split = top.rows();
    Tape& t = *top.tape();
    return t.record(std::move(out), {top, bottom}, [top, bottom, split](Tape& tp, const Matrix& g) {
        tp.accumulate(top, g.topRows(split));
        tp.accumulate(bottom, g.bottomRows(g.rows() - split));
    });
}

Var hstack(const Var& left, const Var& right)
{
    require_same_tape(left, right);
    if (left.rows() != right.rows()) {
        throw DimensionError("hstack: row mismatch");
    }
    Matrix out(left.rows(), left.cols() + right.cols());
    out << left.value(), right.value();
    const Index split = left.cols();
    Tape& t = *left.tape();
    return t.record(std::move(out), {left, right}, [left, right, split](Tape& tp, const Matrix& g) {
        tp.accumulate(left, g.leftCols(split));
        tp.accumulate(right, g.rightCols(g.cols() - split));
    });
}

Var reshape(const Var& a, Index rows, Index cols)
{
    if (rows * cols != a.value().size()) {
        throw DimensionError("reshape: element count changes");
    }
    const Index r0 = a.rows();
    const Index c0 = a.cols();
    Matrix out = Eigen::Map<const Matrix>(a.value().data(), rows, cols);
    Tape& t = *a.tape();
    return t.record(std::move(out), {a}, [a, r0, c0](Tape& tp, const Matrix& g) {
        tp.accumulate(a, Eigen::Map<const Matrix>(g.data(), r0, c0));
    });
}

Var gather_flat(const Var& a, const std::vector<Index>& positions)
{
    const Matrix& x = a.value();
    Matrix out(static_cast<Index>(positions.size()), 1);
    for (std::size_t c = 0; c < positions.size(); ++c) {
        if (positions[c] < 0 || positions[c] >= x.size()) {
            throw DimensionError("gather_flat: position out of range");
        }
        out(static_cast<Index>(c), 0) = x.data()[positions[c]];
    }
    Tape& t = *a.tape();
    return t.record(std::move(out), {a}, [a, positions](Tape& tp, const Matrix& g) {
        const Matrix& x = tp.value(a);
        Matrix ga = Matrix::Zero(x.rows(), x.cols());
        for (std::size_t c = 0; c < positions.size(); ++c) {
            ga.data()[positions[c]] += g(static_cast<Index>(c), 0);
        }
        tp.accumulate(a, ga);
    });
}

Var scatter_flat(const Var& values, const std::vector<Index>& positions, Index rows, Index cols)
{
    const Matrix& v = values.value();
    if (v.size() != static_cast<Index>(positions.size())) {
        throw DimensionError("scatter_flat: value count differs from position count");
    }
    Matrix out = Matrix::Zero(rows, cols);
    for (std::size_t c = 0; c < positions.size(); ++c) {
        if (positions[c] < 0 || positions[c] >= out.size()) {
            throw DimensionError("scatter_flat: position out of range");
        }
        out.data()[positions[c]] += v.data()[c];
    }
    Tape& t = *values.tape();
    return t.record(std::move(out), {values}, [values, positions](Tape& tp, const Matrix& g) {
        const Matrix& v = tp.value(values);
        Matrix gv(v.rows(), v.cols());
        for (std::size_t c = 0; c < positions.size(); ++c) {
            gv.data()[c] = g.data()[positions[c]];
        }
        tp.accumulate(values, gv);
    });
}

Var bce_with_logits(const Var& logits, const Matrix& targets)
{
    const Matrix& l = logits.value();
    if (l.rows() != targets.rows() || l.cols() != targets.cols()) {
        throw DimensionError("bce_with_logits: target shape " + shape_str(targets) +
                             " differs from logits " + shape_str(l));
    }
    double loss = 0.0;
    for (Index i = 0; i < l.size(); ++i) {
        const double x = l.data()[i];
        const double softplus = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
        loss += softplus - targets.data()[i] * x;
    }
    Matrix out(1, 1);
    out(0, 0) = loss;
    Tape& t = *logits.tape();
    return t.record(std::move(out), {logits}, [logits, targets](Tape& tp, const Matrix& g) {
        Matrix p = tp.value(logits).unaryExpr([](double x) {
            return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
        });
        tp.accumulate(logits, g(0, 0) * (p - targets));
    });
}

Var row_l1_normalize(const Var& a)
{
    Tape& t = *a.tape();
    const Matrix& x = a.value();
    Eigen::VectorXd s = x.cwiseAbs().rowwise().sum().array() + kEps;
    Matrix out = x.array().colwise() / s.array();
    return t.record(out, {a}, [a, s, out](Tape& tp, const Matrix& g) {
        const Matrix& x = tp.value(a);
        // d(x_j / s)/dx_l = δ_jl / s - x_j sign(x_l) / s²
        Eigen::VectorXd dot = g.cwiseProduct(out).rowwise().sum();
        Matrix sign = x.unaryExpr([](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
        Matrix ga = (g.array() - sign.array().colwise() * dot.array()).colwise() / s.array();
        tp.accumulate(a, ga);
    });
}

Var gcn_normalize(const Var& adjacency)
{
    const Matrix& a = adjacency.value();
    if (a.rows() != a.cols()) {
        throw DimensionError("gcn_normalize: adjacency must be square");
    }
    const Index n = a.rows();
    Matrix with_loops = a + Matrix::Identity(n, n);
    Eigen::VectorXd deg = with_loops.rowwise().sum();
    if ((deg.array() <= 0.0).any()) {
        throw NumericError("gcn_normalize: nonpositive degree");
    }
    Eigen::VectorXd dinv = deg.array().rsqrt();
    Matrix out = dinv.asDiagonal() * with_loops * dinv.asDiagonal();
    Tape& t = *adjacency.tape();
    return t.record(out, {adjacency}, [adjacency, out, dinv, deg](Tape& tp, const Matrix& g) {
        // Â_ij = a_ij d_i^-1/2 d_j^-1/2, d_i = Σ_j a_ij.
        Matrix go = g.cwiseProduct(out);
        Eigen::VectorXd s = go.rowwise().sum() + go.colwise().sum().transpose();
        Eigen::VectorXd gdeg = -0.5 * s.array() / deg.array();
        Matrix ga = dinv.asDiagonal() * g * dinv.asDiagonal();
        ga.colwise() += gdeg;
        tp.accumulate(adjacency, ga);
    });
}

Var scatter_symmetric(const Matrix& base, const Var& t,
                      const std::vector<std::pair<Index, Index>>& pairs)
{
    const Matrix& tv = t.value();
    if (tv.size() != static_cast<Index>(pairs.size())) {
        throw DimensionError("scatter_symmetric: value count differs from pair count");
    }
    Matrix out = base;
    for (std::size_t c = 0; c < pairs.size(); ++c) {
        const auto [i, j] = pairs[c];
        if (i == j || i < 0 || j < 0 || i >= base.rows() || j >= base.cols()) {
            throw DimensionError("scatter_symmetric: invalid pair");
        }
        const double v = tv.data()[c];
        out(i, j) += v;
        out(j, i) += v;
    }
    Tape& tape = *t.tape();
    return tape.record(std::move(out), {t}, [t, pairs](Tape& tp, const Matrix& g) {
        const Matrix& tv = tp.value(t);
        Matrix gt(tv.rows(), tv.cols());
        for (std::size_t c = 0; c < pairs.size(); ++c) {
            const auto [i, j] = pairs[c];
            gt.data()[c] = g(i, j) + g(j, i);
        }
        tp.accumulate(t, gt);
    });
}

Var pair_hadamard(const Var& x, const std::vector<std::pair<Index, Index>>& pairs)
{
    const Matrix& xv = x.value();
    Matrix out(static_cast<Index>(pairs.size()), xv.cols());
    for (std::size_t c = 0; c < pairs.size(); ++c) {
        const auto [i, j] = pairs[c];
        if (i < 0 || j < 0 || i >= xv.rows() || j >= xv.rows()) {
            throw DimensionError("pair_hadamard: row index out of range");
        }
        out.row(static_cast<Index>(c)) = xv.row(i).cwiseProduct(xv.row(j));
    }
    Tape& t = *x.tape();
    return t.record(std::move(out), {x}, [x, pairs](Tape& tp, const Matrix& g) {
        const Matrix& xv = tp.value(x);
        Matrix gx = Matrix::Zero(xv.rows(), xv.cols());
        for (std::size_t c = 0; c < pairs.size(); ++c) {
            const auto [i, j] = pairs[c];
            const auto r = static_cast<Index>(c);
            gx.row(i) += g.row(r).cwiseProduct(xv.row(j));
            gx.row(j) += g.row(r).cwiseProduct(xv.row(i));
        }
        tp.accumulate(x, gx);
    });
}

} // namespace nicki
