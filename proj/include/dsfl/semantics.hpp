#pragma once

#include <array>
#include <vector>

#include "dsfl/config.hpp"
#include "dsfl/data.hpp"
#include "dsfl/rng.hpp"
#include "dsfl/types.hpp"

namespace dsfl {

// Hidden width of both the encoder and decoder MLPs.
inline constexpr int kHiddenWidth = 64;

// Parameter layout of the toy semantic pipeline, all flattened into one
// ParamVector:
//   encoder    image_size^2 -> h -> latent (ReLU between the affine maps)
//   decoder    latent -> h -> image_size^2 (sigmoid output)
//   classifier latent -> 2 (single affine head on the received symbols)
struct ModelDims {
    int input = 0;
    int hidden = 0;
    int latent = 0;

    // flat offsets, in order: enc_w1, enc_b1, enc_w2, enc_b2,
    //                         dec_w1, dec_b1, dec_w2, dec_b2, cls_w, cls_b
    int enc_w1 = 0, enc_b1 = 0, enc_w2 = 0, enc_b2 = 0;
    int dec_w1 = 0, dec_b1 = 0, dec_w2 = 0, dec_b2 = 0;
    int cls_w = 0, cls_b = 0;
    int total = 0;

    static ModelDims make(int image_size, int latent_dim, int hidden = kHiddenWidth);
};

struct SemanticModel {
    ModelDims dims;
    ParamVector params;  // flat view; aggregation operates on this directly
};

// Weights uniform on [-a, a] with a = sqrt(6 / (fan_in + fan_out)); biases zero.
SemanticModel init_model(const SimConfig& cfg, RngStream& rng);

// Every intermediate needed for the backward pass. The channel noise
// realization is recorded so the same pass can be re-evaluated with
// perturbed weights (finite differences hold the noise fixed).
struct ForwardPass {
    std::vector<double> z1, a1, latent;
    bool pass_through = false;  // all-zero latent: channel degrades to identity
    double norm_scale = 1.0;    // sqrt(n / sum latent^2)
    double latent_sumsq = 0.0;
    std::vector<double> noise;  // per-symbol additive noise (empty if pass-through)
    std::vector<double> received;
    std::vector<double> z3, a3, z4, recon;
    std::array<double, 2> logits{0.0, 0.0};
};

// Encoder -> power-normalized symbols -> AWGN -> decoder + classifier.
// An all-zero latent is substituted with a noiseless pass-through.
ForwardPass forward(const SemanticModel& m, const Image& image, double snr_db, RngStream& rng);

// Same computation with a fixed noise realization (noiseless when empty).
ForwardPass forward_with_noise(const SemanticModel& m, const Image& image,
                               const std::vector<double>& noise);

// Mean squared error over pixels + lambda_cls * softmax cross-entropy.
double loss(const std::vector<double>& reconstruction, const Image& image,
            const std::array<double, 2>& logits, int label, double lambda_cls);

// Exact gradient of the loss with respect to all parameters, holding the
// recorded noise fixed; the power-normalization Jacobian is included, the
// noise addition itself passes gradients through unchanged. `scale`
// multiplies the whole gradient (used for minibatch averaging).
void backward_into(const SemanticModel& m, const ForwardPass& fp, const Image& image,
                   int label, double lambda_cls, double scale, ParamVector& grad);
ParamVector backward(const SemanticModel& m, const ForwardPass& fp, const Image& image,
                     int label, double lambda_cls, double scale = 1.0);

// `iters` full passes of minibatch SGD (batch = min(16, shard size),
// order reshuffled each pass, channel noise sampled per forward at the
// round's SNR). Returns final params minus initial params.
ParamVector local_train(SemanticModel& m, const Dataset& data, const std::vector<int>& shard,
                        int iters, double lr, double lambda_cls, double snr_db, RngStream& rng);

}  // namespace dsfl
