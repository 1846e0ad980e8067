#pragma once

#include "nicki/graph.hpp"
#include "nicki/models.hpp"

#include <cstdint>
#include <vector>

namespace nicki {

/// Class-conditional variational autoencoder over feature rows.
///
/// Encoder q(z | x, c): [x, onehot(c)] → hidden (ReLU) → (μ, log σ²).
/// Decoder p(x | z, c): [z, onehot(c)] → hidden (ReLU) → D logits, sigmoid
/// applied at sampling time so reconstructions lie in [0, 1].
struct CvaeModel {
    Index feature_dim = 0;
    Index num_classes = 0;
    Index latent_dim = 0;
    FeatureKind kind = FeatureKind::discrete;

    Tensor enc_w, enc_b;
    Tensor mu_w, mu_b;
    Tensor logvar_w, logvar_b;
    Tensor dec_w0, dec_b0;
    Tensor dec_w1, dec_b1;

    // Classes seen during training; sampling any other class is an error.
    std::vector<bool> trained_classes;

    // Per-column range used to scale continuous features into [0, 1].
    Eigen::RowVectorXd col_min;
    Eigen::RowVectorXd col_max;

    static CvaeModel glorot(Index feature_dim, Index num_classes, Index hidden, Index latent,
                            FeatureKind kind, Rng& rng);

    Index hidden_dim() const { return enc_w.cols(); }
    std::vector<Tensor> parameters() const;
    NamedTensors named_parameters(const std::string& prefix = "cvae") const;
};

struct CvaeOptions {
    Index hidden = 256;
    Index latent = 32;
    int epochs = 100;
    double lr = 1e-2;
    std::uint64_t seed = 0;
};

Matrix one_hot(const std::vector<int>& classes, Index num_classes);

// Maps continuous rows into [0, 1] with the model's stored column ranges;
// discrete rows pass through.
Matrix cvae_scale(const CvaeModel& model, const Matrix& x);

/// Negative ELBO summed over rows and divided by the row count:
/// reconstruction (Bernoulli for discrete, unit Gaussian on scaled values for
/// continuous) plus KL(q(z|x,c) ‖ N(0, I)). `noise` is the standard-normal
/// draw used by the reparameterization z = μ + exp(½ log σ²) ⊙ noise.
Var cvae_loss(Tape& tape, const CvaeModel& model, const Matrix& x_scaled, const Matrix& cond,
              const Matrix& noise);

// KL(N(μ, diag σ²) ‖ N(0, I)) summed over entries.
Var gaussian_kl(const Var& mu, const Var& logvar);

struct CvaeTrainResult {
    CvaeModel model;
    std::vector<double> loss_history;
};

/// Full-batch Adam on the negative ELBO. Classes with no rows are dropped
/// from conditioning with a warning; fewer than two populated classes is an
/// error.
CvaeTrainResult cvae_train(const Matrix& x, const std::vector<int>& labels, Index num_classes,
                           FeatureKind kind, const CvaeOptions& options);

/// `count` independent decoder outputs for `class_id`, each in [0, 1].
Matrix cvae_sample(const CvaeModel& model, int class_id, Index count, std::uint64_t seed);

} // namespace nicki
