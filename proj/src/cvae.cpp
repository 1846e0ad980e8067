#include "nicki/cvae.hpp"

#include "nicki/errors.hpp"
#include "nicki/log.hpp"
#include "nicki/optim.hpp"

#include <cmath>

namespace nicki {

namespace {

struct Layer {
    Tensor w;
    Tensor b;
};

Layer dense(Index in, Index out, Rng& rng)
{
    return {Tensor(glorot_uniform(in, out, rng), true), Tensor::zeros(1, out, true)};
}

Var affine(Tape& tape, const Var& x, const Tensor& w, const Tensor& b)
{
    return add_row(matmul(x, tape.leaf(w)), tape.leaf(b));
}

Matrix decoder_logits(const CvaeModel& m, const Matrix& z, const Matrix& cond)
{
    Matrix in(z.rows(), z.cols() + cond.cols());
    in << z, cond;
    Matrix h = ((in * m.dec_w0.value()).rowwise() + m.dec_b0.value().row(0)).cwiseMax(0.0);
    return (h * m.dec_w1.value()).rowwise() + m.dec_b1.value().row(0);
}

} // namespace

CvaeModel CvaeModel::glorot(Index feature_dim, Index num_classes, Index hidden, Index latent,
                            FeatureKind kind, Rng& rng)
{
    if (feature_dim < 1 || num_classes < 1 || hidden < 1 || latent < 1) {
        throw ParameterError("CvaeModel: dimensions must be positive");
    }
    CvaeModel m;
    m.feature_dim = feature_dim;
    m.num_classes = num_classes;
    m.latent_dim = latent;
    m.kind = kind;
    auto enc = dense(feature_dim + num_classes, hidden, rng);
    auto mu = dense(hidden, latent, rng);
    auto lv = dense(hidden, latent, rng);
    auto d0 = dense(latent + num_classes, hidden, rng);
    auto d1 = dense(hidden, feature_dim, rng);
    m.enc_w = enc.w;
    m.enc_b = enc.b;
    m.mu_w = mu.w;
    m.mu_b = mu.b;
    m.logvar_w = lv.w;
    m.logvar_b = lv.b;
    m.dec_w0 = d0.w;
    m.dec_b0 = d0.b;
    m.dec_w1 = d1.w;
    m.dec_b1 = d1.b;
    m.trained_classes.assign(static_cast<std::size_t>(num_classes), true);
    m.col_min = Eigen::RowVectorXd::Zero(feature_dim);
    m.col_max = Eigen::RowVectorXd::Ones(feature_dim);
    return m;
}

std::vector<Tensor> CvaeModel::parameters() const
{
    return {enc_w, enc_b, mu_w, mu_b, logvar_w, logvar_b, dec_w0, dec_b0, dec_w1, dec_b1};
}

NamedTensors CvaeModel::named_parameters(const std::string& prefix) const
{
    return {{prefix + ".enc_w", enc_w},       {prefix + ".enc_b", enc_b},
            {prefix + ".mu_w", mu_w},         {prefix + ".mu_b", mu_b},
            {prefix + ".logvar_w", logvar_w}, {prefix + ".logvar_b", logvar_b},
            {prefix + ".dec_w0", dec_w0},     {prefix + ".dec_b0", dec_b0},
            {prefix + ".dec_w1", dec_w1},     {prefix + ".dec_b1", dec_b1}};
}

Matrix one_hot(const std::vector<int>& classes, Index num_classes)
{
    Matrix out = Matrix::Zero(static_cast<Index>(classes.size()), num_classes);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i] < 0 || classes[i] >= num_classes) {
            throw ParameterError("one_hot: class " + std::to_string(classes[i]) + " out of range");
        }
        out(static_cast<Index>(i), classes[i]) = 1.0;
    }
    return out;
}

Matrix cvae_scale(const CvaeModel& model, const Matrix& x)
{
    if (x.cols() != model.feature_dim) {
        throw DimensionError("cvae_scale: feature width mismatch");
    }
    if (model.kind != FeatureKind::continuous) {
        return x;
    }
    Eigen::RowVectorXd span = (model.col_max - model.col_min).cwiseMax(kEps);
    Matrix out = (x.rowwise() - model.col_min).array().rowwise() / span.array();
    return out.cwiseMax(0.0).cwiseMin(1.0);
}

Var gaussian_kl(const Var& mu, const Var& logvar)
{
    // ½ Σ (μ² + σ² − log σ² − 1)
    Var inner = add_scalar(mul(mu, mu) + exp(logvar) - logvar, -1.0);
    return scale(sum(inner), 0.5);
}

Var cvae_loss(Tape& tape, const CvaeModel& model, const Matrix& x_scaled, const Matrix& cond,
              const Matrix& noise)
{
    const Index n = x_scaled.rows();
    if (n == 0) {
        throw ContractError("cvae_loss: no rows");
    }
    if (x_scaled.cols() != model.feature_dim || cond.cols() != model.num_classes ||
        cond.rows() != n || noise.rows() != n || noise.cols() != model.latent_dim) {
        throw DimensionError("cvae_loss: input shapes do not match the model");
    }
    Matrix enc_in(n, x_scaled.cols() + cond.cols());
    enc_in << x_scaled, cond;
    Var h = relu(affine(tape, tape.constant(std::move(enc_in)), model.enc_w, model.enc_b));
    Var mu = affine(tape, h, model.mu_w, model.mu_b);
    Var logvar = affine(tape, h, model.logvar_w, model.logvar_b);
    Var z = mu + mul(exp(scale(logvar, 0.5)), tape.constant(noise));
    Var dec_in = hstack(z, tape.constant(cond));
    Var dh = relu(affine(tape, dec_in, model.dec_w0, model.dec_b0));
    Var logits = affine(tape, dh, model.dec_w1, model.dec_b1);

    Var recon;
    if (model.kind == FeatureKind::continuous) {
        Var diff = sigmoid(logits) - tape.constant(x_scaled);
        recon = scale(sum(mul(diff, diff)), 0.5);
    } else {
        recon = bce_with_logits(logits, x_scaled);
    }
    return scale(recon + gaussian_kl(mu, logvar), 1.0 / static_cast<double>(n));
}

CvaeTrainResult cvae_train(const Matrix& x, const std::vector<int>& labels, Index num_classes,
                           FeatureKind kind, const CvaeOptions& options)
{
    if (kind == FeatureKind::none) {
        throw ContractError("cvae_train: graph has no features");
    }
    if (static_cast<Index>(labels.size()) != x.rows()) {
        throw DimensionError("cvae_train: one label per feature row required");
    }
    if (kind == FeatureKind::discrete &&
        ((x.array() != 0.0) && (x.array() != 1.0)).any()) {
        throw ParameterError("cvae_train: discrete features must be binary");
    }
    std::vector<Index> counts(static_cast<std::size_t>(num_classes), 0);
    for (int c : labels) {
        if (c < 0 || c >= num_classes) {
            throw ParameterError("cvae_train: label " + std::to_string(c) + " out of range");
        }
        ++counts[static_cast<std::size_t>(c)];
    }
    int populated = 0;
    for (Index c = 0; c < num_classes; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) {
            log().warn("cvae_train: class {} has no rows and is excluded from conditioning", c);
        } else {
            ++populated;
        }
    }
    if (populated < 2) {
        throw ContractError("cvae_train: at least two populated classes required");
    }

    Rng rng(derive_seed(options.seed, "cvae.init"));
    CvaeTrainResult result;
    result.model = CvaeModel::glorot(x.cols(), num_classes, options.hidden, options.latent, kind, rng);
    CvaeModel& m = result.model;
    for (Index c = 0; c < num_classes; ++c) {
        m.trained_classes[static_cast<std::size_t>(c)] = counts[static_cast<std::size_t>(c)] > 0;
    }
    if (kind == FeatureKind::continuous) {
        m.col_min = x.colwise().minCoeff();
        m.col_max = x.colwise().maxCoeff();
    }
    const Matrix xs = cvae_scale(m, x);
    const Matrix cond = one_hot(labels, num_classes);

    Adam adam(m.parameters(), AdamOptions{options.lr});
    Rng noise_rng(derive_seed(options.seed, "cvae.noise"));
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        Matrix noise(x.rows(), options.latent);
        for (Index i = 0; i < noise.size(); ++i) {
            noise.data()[i] = noise_rng.normal();
        }
        adam.zero_grad();
        Tape tape;
        Var loss = cvae_loss(tape, m, xs, cond, noise);
        tape.backward(loss);
        adam.step();
        result.loss_history.push_back(loss.scalar());
    }
    return result;
}

Matrix cvae_sample(const CvaeModel& model, int class_id, Index count, std::uint64_t seed)
{
    if (class_id < 0 || class_id >= model.num_classes ||
        !model.trained_classes[static_cast<std::size_t>(class_id)]) {
        throw ParameterError("cvae_sample: class " + std::to_string(class_id) +
                             " was not part of training");
    }
    if (count < 0) {
        throw ParameterError("cvae_sample: negative count");
    }
    if (count == 0) {
        return Matrix(0, model.feature_dim);
    }
    Rng rng(seed);
    Matrix z(count, model.latent_dim);
    for (Index i = 0; i < z.size(); ++i) {
        z.data()[i] = rng.normal();
    }
    const Matrix cond = one_hot(std::vector<int>(static_cast<std::size_t>(count), class_id),
                                model.num_classes);
    Matrix logits = decoder_logits(model, z, cond);
    return logits.unaryExpr([](double v) {
        return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    });
}

} // namespace nicki
