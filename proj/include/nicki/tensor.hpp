#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <deque>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace nicki {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = MatrixX<double>;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Added inside every log and denominator evaluated by the tape.
inline constexpr double kEps = 1e-12;

/// A dense row-major matrix that may carry a gradient buffer.
///
/// Tensors are shared handles: copies alias the same storage. Trainable
/// parameters are created with `requires_grad = true`, which allocates a
/// zero gradient of identical shape. Gradients accumulate across backward
/// passes on different tapes until `zero_grad()` is called.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Matrix value, bool requires_grad = false);

    static Tensor zeros(Index rows, Index cols, bool requires_grad = false);

    bool defined() const { return static_cast<bool>(impl_); }
    Index rows() const { return impl_->value.rows(); }
    Index cols() const { return impl_->value.cols(); }

    const Matrix& value() const { return impl_->value; }
    Matrix& value() { return impl_->value; }

    bool requires_grad() const { return impl_->requires_grad; }
    bool has_grad() const { return impl_->requires_grad; }
    const Matrix& grad() const;
    Matrix& grad();
    void zero_grad();

    bool same(const Tensor& other) const { return impl_ == other.impl_; }

private:
    friend class Tape;
    struct Impl {
        Matrix value;
        Matrix grad;
        bool requires_grad = false;
    };
    std::shared_ptr<Impl> impl_;
};

class Tape;

/// Handle to a value recorded on a tape.
class Var {
public:
    Var() = default;

    const Matrix& value() const;
    Index rows() const { return value().rows(); }
    Index cols() const { return value().cols(); }
    double scalar() const;

    Tape* tape() const { return tape_; }
    int id() const { return id_; }
    bool valid() const { return tape_ != nullptr; }

private:
    friend class Tape;
    Var(Tape* tape, int id) : tape_(tape), id_(id) {}
    Tape* tape_ = nullptr;
    int id_ = -1;
};

/// Reverse-mode record of forward operations.
///
/// Nodes are appended in execution order, so parents always precede their
/// children. `backward` may run once per tape; a second call throws
/// ContractError. Gradients of leaves bound to trainable tensors are added
/// into the tensor's gradient buffer; callers zero those buffers themselves.
class Tape {
public:
    using BackwardFn = std::function<void(Tape&, const Matrix& grad_out)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var leaf(const Tensor& tensor);
    Var constant(Matrix value);

    // Appends an op node. `fn` receives the node's upstream gradient and
    // must call `accumulate` on each parent that needs a gradient.
    Var record(Matrix value, const std::vector<Var>& parents, BackwardFn fn);

    bool needs_grad(const Var& v) const { return node(v).needs_grad; }

    template <typename Derived>
    void accumulate(const Var& v, const Eigen::MatrixBase<Derived>& g)
    {
        Node& n = node(v);
        if (!n.needs_grad) {
            return;
        }
        if (n.grad.size() == 0) {
            n.grad = g;
        } else {
            n.grad += g;
        }
    }

    const Matrix& value(const Var& v) const { return node(v).value; }

    // Gradient reached at `v` during the last backward pass; zero if unreached.
    Matrix grad(const Var& v) const;

    void backward(const Var& loss);

    std::size_t size() const { return nodes_.size(); }
    bool consumed() const { return consumed_; }

private:
    struct Node {
        Matrix value;
        Matrix grad;
        bool needs_grad = false;
        BackwardFn backward;
        std::shared_ptr<Tensor::Impl> sink;
    };

    Node& node(const Var& v);
    const Node& node(const Var& v) const;

    // deque keeps references to node values stable while recording.
    std::deque<Node> nodes_;
    bool consumed_ = false;
};

// ---------------------------------------------------------------------------
// Differentiable operations. Every binary op requires both operands on the
// same tape.

Var matmul(const Var& a, const Var& b);

// a · b with `a` a shared constant; avoids copying large fixed operators
// (normalized adjacencies) onto every tape.
Var matmul(std::shared_ptr<const Matrix> a, const Var& b);
Var matmul(std::shared_ptr<const SparseMatrix> a, const Var& b);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var neg(const Var& a);
Var scale(const Var& a, double factor);
Var add_scalar(const Var& a, double value);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator-(const Var& a) { return neg(a); }
inline Var operator*(double s, const Var& a) { return scale(a, s); }

// Broadcasts a 1×c row over every row of `a`.
Var add_row(const Var& a, const Var& row);

Var log(const Var& a);
Var exp(const Var& a);
Var relu(const Var& a);
Var sigmoid(const Var& a);
Var tanh(const Var& a);

Var sum(const Var& a);
Var mean(const Var& a);

// Softmax of x / tau over each row, max-subtracted.
Var row_softmax(const Var& x, double tau = 1.0);

// Mean cross-entropy of row-softmax(logits) at `ids` against `labels[id]`.
Var softmax_cross_entropy(const Var& logits, const std::vector<int>& labels,
                          const std::vector<Index>& ids);

Var gather_rows(const Var& a, const std::vector<Index>& ids);
Var slice_rows(const Var& a, Index start, Index count);
Var mean_rows(const Var& a, const std::vector<Index>& ids);
Var vstack(const Var& top, const Var& bottom);
Var hstack(const Var& left, const Var& right);
Var reshape(const Var& a, Index rows, Index cols);

// Entries of `a` at flat row-major positions, as a column vector.
Var gather_flat(const Var& a, const std::vector<Index>& positions);

// rows×cols zero matrix with values[c] written at flat row-major position
// positions[c]; inverse of gather_flat.
Var scatter_flat(const Var& values, const std::vector<Index>& positions, Index rows, Index cols);

// Σ softplus(l) − y·l over all entries: Bernoulli negative log-likelihood of
// targets `y` under logits `l`, computed without forming log(sigmoid).
Var bce_with_logits(const Var& logits, const Matrix& targets);

// Row-wise L1 normalization x / (sum |x| + eps). Input assumed nonnegative.
Var row_l1_normalize(const Var& a);

// D^-1/2 (A + I) D^-1/2 with D = rowsum(A + I), differentiable in A.
Var gcn_normalize(const Var& adjacency);

// base + sum_c t_c (e_{ij} + e_{ji}) for pairs[c] = (i, j), i != j.
Var scatter_symmetric(const Matrix& base, const Var& t,
                      const std::vector<std::pair<Index, Index>>& pairs);

// Row c is x[pairs[c].first] ∘ x[pairs[c].second].
Var pair_hadamard(const Var& x, const std::vector<std::pair<Index, Index>>& pairs);

} // namespace nicki
