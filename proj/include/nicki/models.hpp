#pragma once

#include "nicki/random.hpp"
#include "nicki/tensor.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nicki {

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

// Glorot-uniform initialization, U(−a, a) with a = sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(Index fan_in, Index fan_out, Rng& rng);

// Whether a forward pass records parameters as trainable leaves or as constants.
enum class Grad { track, frozen };

/// Two-layer graph convolution: Â σ1(Â X W0) W1 with σ1 = ReLU and a linear
/// output. Used both as classifier (softmax on top) and as encoder.
struct GcnModel {
    Tensor w0;
    Tensor w1;

    static GcnModel glorot(Index in, Index hidden, Index out, Rng& rng);
    static GcnModel zeros(Index in, Index hidden, Index out);

    Index input_dim() const { return w0.rows(); }
    Index hidden_dim() const { return w0.cols(); }
    Index output_dim() const { return w1.cols(); }

    std::vector<Tensor> parameters() const { return {w0, w1}; }
    NamedTensors named_parameters(const std::string& prefix = "gcn") const;
    GcnModel clone() const;
};

// Raw per-node outputs (logits or latent Z).
Var gcn_forward(const Var& a_hat, const Var& x, const GcnModel& model, Grad grad = Grad::track);
Var gcn_forward(std::shared_ptr<const Matrix> a_hat, const Var& x, const GcnModel& model,
                Grad grad = Grad::track);

// Row-softmax class probabilities without recording a tape.
Matrix gcn_probabilities(const Matrix& a_hat, const Matrix& x, const GcnModel& model);
Matrix gcn_probabilities(const SparseMatrix& a_hat, const Matrix& x, const GcnModel& model);
Matrix gcn_hidden(const Matrix& a_hat, const Matrix& x, const GcnModel& model);
Matrix gcn_hidden(const SparseMatrix& a_hat, const Matrix& x, const GcnModel& model);
std::vector<int> gcn_predict(const Matrix& a_hat, const Matrix& x, const GcnModel& model);
std::vector<int> gcn_predict(const SparseMatrix& a_hat, const Matrix& x, const GcnModel& model);

struct TrainOptions {
    Index hidden = 16;
    int epochs = 200;
    double lr = 0.01;
    std::uint64_t seed = 0;
    // Keep the parameters with the best validation accuracy.
    bool select_best_val = true;
};

struct TrainResult {
    GcnModel model;
    std::vector<double> loss_history;
    std::vector<double> val_history;
    int best_epoch = -1;
};

/// Adam-trains a fresh two-layer GCN classifier on cross-entropy over
/// `train_ids`. `labels` must cover every row of `x`.
TrainResult train_surrogate(std::shared_ptr<const SparseMatrix> a_hat, const Matrix& x,
                            const std::vector<int>& labels, int num_classes,
                            const std::vector<Index>& train_ids, const std::vector<Index>& val_ids,
                            const TrainOptions& options);
TrainResult train_surrogate(const Matrix& a_hat, const Matrix& x, const std::vector<int>& labels,
                            int num_classes, const std::vector<Index>& train_ids,
                            const std::vector<Index>& val_ids, const TrainOptions& options);

// Fraction of `test_ids` with label `target` that are predicted as `target`.
double target_class_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels,
                             const std::vector<Index>& test_ids, int target);

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels,
                const std::vector<Index>& ids);

/// Fully connected network: ReLU between layers, linear last layer.
struct MlpModel {
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;

    static MlpModel glorot(const std::vector<Index>& widths, Rng& rng);
    static MlpModel zeros(const std::vector<Index>& widths);

    Index input_dim() const { return weights.front().rows(); }
    Index output_dim() const { return weights.back().cols(); }
    std::vector<Index> widths() const;

    std::vector<Tensor> parameters() const;
    NamedTensors named_parameters(const std::string& prefix = "mlp") const;
};

Var mlp_forward(const Var& x, const MlpModel& model, Grad grad = Grad::track);

// Scalar head over Hadamard pair vectors:
// d → 5d/4 → d → d/2 → d/2 → d/2 → d/16 → 1, each hidden width at least 4.
std::vector<Index> edge_scorer_widths(Index dim);

// Per-row mapping latent → 5d/4 → 5d/4 → d.
std::vector<Index> feature_scorer_widths(Index latent, Index dim);

} // namespace nicki
