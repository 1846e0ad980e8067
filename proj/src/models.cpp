#include "nicki/models.hpp"

#include "nicki/errors.hpp"
#include "nicki/optim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace nicki {

Matrix glorot_uniform(Index fan_in, Index fan_out, Rng& rng)
{
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (Index i = 0; i < w.size(); ++i) {
        w.data()[i] = (2.0 * rng.uniform() - 1.0) * a;
    }
    return w;
}

namespace {

Var param(Tape& tape, const Tensor& t, Grad grad)
{
    return grad == Grad::track ? tape.leaf(t) : tape.constant(t.value());
}

} // namespace

// ---------------------------------------------------------------------------
// GCN

GcnModel GcnModel::glorot(Index in, Index hidden, Index out, Rng& rng)
{
    GcnModel m;
    m.w0 = Tensor(glorot_uniform(in, hidden, rng), true);
    m.w1 = Tensor(glorot_uniform(hidden, out, rng), true);
    return m;
}

GcnModel GcnModel::zeros(Index in, Index hidden, Index out)
{
    return {Tensor::zeros(in, hidden, true), Tensor::zeros(hidden, out, true)};
}

NamedTensors GcnModel::named_parameters(const std::string& prefix) const
{
    return {{prefix + ".w0", w0}, {prefix + ".w1", w1}};
}

GcnModel GcnModel::clone() const
{
    return {Tensor(w0.value(), true), Tensor(w1.value(), true)};
}

Var gcn_forward(const Var& a_hat, const Var& x, const GcnModel& model, Grad grad)
{
    Tape& tape = *x.tape();
    if (a_hat.rows() != a_hat.cols() || a_hat.rows() != x.rows()) {
        throw DimensionError("gcn_forward: adjacency does not match feature rows");
    }
    if (x.cols() != model.input_dim()) {
        throw DimensionError("gcn_forward: feature width " + std::to_string(x.cols()) +
                             " differs from model input " + std::to_string(model.input_dim()));
    }
    Var h = relu(matmul(a_hat, matmul(x, param(tape, model.w0, grad))));
    return matmul(a_hat, matmul(h, param(tape, model.w1, grad)));
}

Var gcn_forward(std::shared_ptr<const Matrix> a_hat, const Var& x, const GcnModel& model, Grad grad)
{
    Tape& tape = *x.tape();
    if (a_hat->rows() != a_hat->cols() || a_hat->rows() != x.rows()) {
        throw DimensionError("gcn_forward: adjacency does not match feature rows");
    }
    if (x.cols() != model.input_dim()) {
        throw DimensionError("gcn_forward: feature width " + std::to_string(x.cols()) +
                             " differs from model input " + std::to_string(model.input_dim()));
    }
    Var h = relu(matmul(a_hat, matmul(x, param(tape, model.w0, grad))));
    return matmul(a_hat, matmul(h, param(tape, model.w1, grad)));
}

namespace {

template <typename Adj>
Matrix hidden_impl(const Adj& a_hat, const Matrix& x, const GcnModel& model)
{
    if (x.cols() != model.input_dim() || a_hat.cols() != x.rows()) {
        throw DimensionError("gcn_hidden: shape mismatch");
    }
    Matrix xw = x * model.w0.value();
    Matrix h = a_hat * xw;
    return h.cwiseMax(0.0);
}

template <typename Adj>
Matrix logits_impl(const Adj& a_hat, const Matrix& x, const GcnModel& model)
{
    Matrix hw = hidden_impl(a_hat, x, model) * model.w1.value();
    return a_hat * hw;
}

Matrix softmax_rows(const Matrix& z)
{
    Eigen::VectorXd mx = z.rowwise().maxCoeff();
    Matrix e = (z.colwise() - mx).array().exp();
    Eigen::VectorXd s = e.rowwise().sum();
    return e.array().colwise() / s.array();
}

std::vector<int> argmax_rows(const Matrix& z)
{
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    for (Index i = 0; i < z.rows(); ++i) {
        Index arg = 0;
        z.row(i).maxCoeff(&arg);
        out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
    }
    return out;
}

} // namespace

Matrix gcn_hidden(const Matrix& a_hat, const Matrix& x, const GcnModel& model)
{
    return hidden_impl(a_hat, x, model);
}

Matrix gcn_hidden(const SparseMatrix& a_hat, const Matrix& x, const GcnModel& model)
{
    return hidden_impl(a_hat, x, model);
}

Matrix gcn_probabilities(const Matrix& a_hat, const Matrix& x, const GcnModel& model)
{
    return softmax_rows(logits_impl(a_hat, x, model));
}

Matrix gcn_probabilities(const SparseMatrix& a_hat, const Matrix& x, const GcnModel& model)
{
    return softmax_rows(logits_impl(a_hat, x, model));
}

std::vector<int> gcn_predict(const Matrix& a_hat, const Matrix& x, const GcnModel& model)
{
    return argmax_rows(logits_impl(a_hat, x, model));
}

std::vector<int> gcn_predict(const SparseMatrix& a_hat, const Matrix& x, const GcnModel& model)
{
    return argmax_rows(logits_impl(a_hat, x, model));
}

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels,
                const std::vector<Index>& ids)
{
    if (ids.empty()) {
        return 0.0;
    }
    Index hits = 0;
    for (Index i : ids) {
        hits += predictions.at(static_cast<std::size_t>(i)) == labels.at(static_cast<std::size_t>(i));
    }
    return static_cast<double>(hits) / static_cast<double>(ids.size());
}

double target_class_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels,
                             const std::vector<Index>& test_ids, int target)
{
    Index total = 0;
    Index hits = 0;
    for (Index i : test_ids) {
        if (labels.at(static_cast<std::size_t>(i)) != target) {
            continue;
        }
        ++total;
        hits += predictions.at(static_cast<std::size_t>(i)) == target;
    }
    if (total == 0) {
        throw ContractError("target_class_accuracy: no test nodes of class " + std::to_string(target));
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

TrainResult train_surrogate(const Matrix& a_hat, const Matrix& x, const std::vector<int>& labels,
                            int num_classes, const std::vector<Index>& train_ids,
                            const std::vector<Index>& val_ids, const TrainOptions& options)
{
    auto sparse = std::make_shared<const SparseMatrix>(a_hat.sparseView());
    return train_surrogate(sparse, x, labels, num_classes, train_ids, val_ids, options);
}

TrainResult train_surrogate(std::shared_ptr<const SparseMatrix> a_hat, const Matrix& x,
                            const std::vector<int>& labels, int num_classes,
                            const std::vector<Index>& train_ids, const std::vector<Index>& val_ids,
                            const TrainOptions& options)
{
    if (train_ids.empty()) {
        throw ContractError("train_surrogate: empty training set");
    }
    if (static_cast<Index>(labels.size()) != x.rows()) {
        throw DimensionError("train_surrogate: labels do not cover every node");
    }
    std::set<int> seen;
    for (Index i : train_ids) {
        seen.insert(labels.at(static_cast<std::size_t>(i)));
    }
    if (seen.size() < 2) {
        throw ContractError("train_surrogate: training set contains a single class");
    }

    Rng rng(options.seed);
    TrainResult result;
    result.model = GcnModel::glorot(x.cols(), options.hidden, num_classes, rng);
    GcnModel best = result.model.clone();
    double best_val = -1.0;
    Adam adam(result.model.parameters(), AdamOptions{options.lr});

    // Â X is fixed across epochs.
    auto ax = std::make_shared<const Matrix>(*a_hat * x);
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        adam.zero_grad();
        Tape tape;
        Var w0 = tape.leaf(result.model.w0);
        Var w1 = tape.leaf(result.model.w1);
        Var h = relu(matmul(ax, w0));
        Var logits = matmul(a_hat, matmul(h, w1));
        Var loss = softmax_cross_entropy(logits, labels, train_ids);
        tape.backward(loss);
        adam.step();
        result.loss_history.push_back(loss.scalar());

        if (options.select_best_val && !val_ids.empty()) {
            const double val = accuracy(gcn_predict(*a_hat, x, result.model), labels, val_ids);
            result.val_history.push_back(val);
            if (val > best_val) {
                best_val = val;
                best = result.model.clone();
                result.best_epoch = epoch;
            }
        }
    }
    if (options.select_best_val && !val_ids.empty() && result.best_epoch >= 0) {
        result.model = best;
    } else {
        result.best_epoch = options.epochs - 1;
    }
    return result;
}

// ---------------------------------------------------------------------------
// MLP

MlpModel MlpModel::glorot(const std::vector<Index>& widths, Rng& rng)
{
    if (widths.size() < 2) {
        throw ParameterError("MlpModel: need at least input and output widths");
    }
    MlpModel m;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        m.weights.emplace_back(glorot_uniform(widths[l], widths[l + 1], rng), true);
        m.biases.push_back(Tensor::zeros(1, widths[l + 1], true));
    }
    return m;
}

MlpModel MlpModel::zeros(const std::vector<Index>& widths)
{
    if (widths.size() < 2) {
        throw ParameterError("MlpModel: need at least input and output widths");
    }
    MlpModel m;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        m.weights.push_back(Tensor::zeros(widths[l], widths[l + 1], true));
        m.biases.push_back(Tensor::zeros(1, widths[l + 1], true));
    }
    return m;
}

std::vector<Index> MlpModel::widths() const
{
    std::vector<Index> w{weights.front().rows()};
    for (const Tensor& t : weights) {
        w.push_back(t.cols());
    }
    return w;
}

std::vector<Tensor> MlpModel::parameters() const
{
    std::vector<Tensor> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.push_back(weights[l]);
        out.push_back(biases[l]);
    }
    return out;
}

NamedTensors MlpModel::named_parameters(const std::string& prefix) const
{
    NamedTensors out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.emplace_back(prefix + ".w" + std::to_string(l), weights[l]);
        out.emplace_back(prefix + ".b" + std::to_string(l), biases[l]);
    }
    return out;
}

Var mlp_forward(const Var& x, const MlpModel& model, Grad grad)
{
    if (x.cols() != model.input_dim()) {
        throw DimensionError("mlp_forward: input width " + std::to_string(x.cols()) +
                             " differs from first layer " + std::to_string(model.input_dim()));
    }
    Tape& tape = *x.tape();
    Var h = x;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        h = add_row(matmul(h, param(tape, model.weights[l], grad)), param(tape, model.biases[l], grad));
        if (l + 1 < model.weights.size()) {
            h = relu(h);
        }
    }
    return h;
}

std::vector<Index> edge_scorer_widths(Index dim)
{
    auto w = [](Index v) { return std::max<Index>(v, 4); };
    return {dim, w(5 * dim / 4), w(dim), w(dim / 2), w(dim / 2), w(dim / 2), w(dim / 16), 1};
}

std::vector<Index> feature_scorer_widths(Index latent, Index dim)
{
    const Index hidden = std::max<Index>(5 * dim / 4, 4);
    return {latent, hidden, hidden, dim};
}

} // namespace nicki
