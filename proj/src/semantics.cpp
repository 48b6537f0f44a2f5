#include "dsfl/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsfl {

ModelDims ModelDims::make(int image_size, int latent_dim, int hidden) {
    ModelDims d;
    d.input = image_size * image_size;
    d.hidden = hidden;
    d.latent = latent_dim;
    int off = 0;
    auto claim = [&off](int n) {
        int at = off;
        off += n;
        return at;
    };
    d.enc_w1 = claim(d.hidden * d.input);
    d.enc_b1 = claim(d.hidden);
    d.enc_w2 = claim(d.latent * d.hidden);
    d.enc_b2 = claim(d.latent);
    d.dec_w1 = claim(d.hidden * d.latent);
    d.dec_b1 = claim(d.hidden);
    d.dec_w2 = claim(d.input * d.hidden);
    d.dec_b2 = claim(d.input);
    d.cls_w = claim(2 * d.latent);
    d.cls_b = claim(2);
    d.total = off;
    return d;
}

namespace {

// y = W x + b, W stored row-major as rows x cols.
void affine(const double* w, const double* b, const double* x, int rows, int cols, double* y) {
    for (int r = 0; r < rows; ++r) {
        double acc = b[r];
        const double* wr = w + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) acc += wr[c] * x[c];
        y[r] = acc;
    }
}

// grad_x += W^T dy; grad_w += scale * dy x^T; grad_b += scale * dy
void affine_backward(const double* w, const double* x, const double* dy, int rows, int cols,
                     double scale, double* gw, double* gb, double* gx) {
    for (int r = 0; r < rows; ++r) {
        const double* wr = w + static_cast<std::size_t>(r) * cols;
        double* gwr = gw + static_cast<std::size_t>(r) * cols;
        const double d = dy[r];
        gb[r] += scale * d;
        for (int c = 0; c < cols; ++c) {
            gwr[c] += scale * d * x[c];
            if (gx) gx[c] += wr[c] * d;
        }
    }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void init_layer(ParamVector& p, int w_off, int rows, int cols, RngStream& rng) {
    double a = std::sqrt(6.0 / (rows + cols));
    for (int i = 0; i < rows * cols; ++i) p[w_off + i] = rng.uniform(-a, a);
}

}  // namespace

SemanticModel init_model(const SimConfig& cfg, RngStream& rng) {
    SemanticModel m;
    m.dims = ModelDims::make(cfg.image_size, cfg.latent_dim);
    m.params.assign(m.dims.total, 0.0);
    const ModelDims& d = m.dims;
    init_layer(m.params, d.enc_w1, d.hidden, d.input, rng);
    init_layer(m.params, d.enc_w2, d.latent, d.hidden, rng);
    init_layer(m.params, d.dec_w1, d.hidden, d.latent, rng);
    init_layer(m.params, d.dec_w2, d.input, d.hidden, rng);
    init_layer(m.params, d.cls_w, 2, d.latent, rng);
    return m;
}

namespace {

void run_encoder(const SemanticModel& m, const Image& image, ForwardPass& fp) {
    const ModelDims& d = m.dims;
    if (static_cast<int>(image.px.size()) != d.input)
        throw std::invalid_argument("forward: image size mismatch");
    const double* p = m.params.data();
    fp.z1.resize(d.hidden);
    affine(p + d.enc_w1, p + d.enc_b1, image.px.data(), d.hidden, d.input, fp.z1.data());
    fp.a1.resize(d.hidden);
    for (int i = 0; i < d.hidden; ++i) fp.a1[i] = fp.z1[i] > 0.0 ? fp.z1[i] : 0.0;
    fp.latent.resize(d.latent);
    affine(p + d.enc_w2, p + d.enc_b2, fp.a1.data(), d.latent, d.hidden, fp.latent.data());
    fp.latent_sumsq = 0.0;
    for (double v : fp.latent) fp.latent_sumsq += v * v;
}

void run_channel_and_decoder(const SemanticModel& m, ForwardPass& fp,
                             const std::vector<double>& noise) {
    const ModelDims& d = m.dims;
    const double* p = m.params.data();

    fp.received.resize(d.latent);
    if (fp.latent_sumsq == 0.0 || noise.empty()) {
        fp.pass_through = true;
        fp.norm_scale = 1.0;
        fp.received = fp.latent;
    } else {
        if (static_cast<int>(noise.size()) != d.latent)
            throw std::invalid_argument("forward: noise length mismatch");
        fp.noise = noise;
        fp.norm_scale = std::sqrt(static_cast<double>(d.latent) / fp.latent_sumsq);
        for (int i = 0; i < d.latent; ++i)
            fp.received[i] = fp.latent[i] * fp.norm_scale + noise[i];
    }

    fp.z3.resize(d.hidden);
    affine(p + d.dec_w1, p + d.dec_b1, fp.received.data(), d.hidden, d.latent, fp.z3.data());
    fp.a3.resize(d.hidden);
    for (int i = 0; i < d.hidden; ++i) fp.a3[i] = fp.z3[i] > 0.0 ? fp.z3[i] : 0.0;
    fp.z4.resize(d.input);
    affine(p + d.dec_w2, p + d.dec_b2, fp.a3.data(), d.input, d.hidden, fp.z4.data());
    fp.recon.resize(d.input);
    for (int i = 0; i < d.input; ++i) fp.recon[i] = sigmoid(fp.z4[i]);

    double logits[2];
    affine(p + d.cls_w, p + d.cls_b, fp.received.data(), 2, d.latent, logits);
    fp.logits = {logits[0], logits[1]};
}

}  // namespace

ForwardPass forward_with_noise(const SemanticModel& m, const Image& image,
                               const std::vector<double>& noise) {
    ForwardPass fp;
    run_encoder(m, image, fp);
    run_channel_and_decoder(m, fp, noise);
    return fp;
}

ForwardPass forward(const SemanticModel& m, const Image& image, double snr_db, RngStream& rng) {
    ForwardPass fp;
    run_encoder(m, image, fp);
    if (fp.latent_sumsq == 0.0) {
        // zero-power signal: substitute the noiseless pass-through
        run_channel_and_decoder(m, fp, {});
        return fp;
    }
    const double sigma = std::sqrt(std::pow(10.0, -snr_db / 10.0));
    std::vector<double> noise(m.dims.latent);
    for (int i = 0; i < m.dims.latent; ++i) noise[i] = sigma * rng.normal();
    run_channel_and_decoder(m, fp, noise);
    return fp;
}

double loss(const std::vector<double>& reconstruction, const Image& image,
            const std::array<double, 2>& logits, int label, double lambda_cls) {
    if (reconstruction.size() != image.px.size())
        throw std::invalid_argument("loss: shape mismatch");
    double mse = 0.0;
    for (std::size_t i = 0; i < reconstruction.size(); ++i) {
        double e = reconstruction[i] - image.px[i];
        mse += e * e;
    }
    mse /= static_cast<double>(reconstruction.size());

    // log-sum-exp form of softmax cross-entropy
    double mx = std::max(logits[0], logits[1]);
    double lse = mx + std::log(std::exp(logits[0] - mx) + std::exp(logits[1] - mx));
    double ce = lse - logits[label];
    return mse + lambda_cls * ce;
}

void backward_into(const SemanticModel& m, const ForwardPass& fp, const Image& image,
                   int label, double lambda_cls, double scale, ParamVector& grad) {
    const ModelDims& d = m.dims;
    if (static_cast<int>(grad.size()) != d.total)
        throw std::invalid_argument("backward: gradient buffer size mismatch");
    if (fp.recon.size() != image.px.size())
        throw std::invalid_argument("backward: cache does not match image");
    const double* p = m.params.data();
    double* g = grad.data();

    // reconstruction head
    std::vector<double> dz4(d.input);
    const double inv_n = 1.0 / static_cast<double>(d.input);
    for (int i = 0; i < d.input; ++i) {
        double dr = 2.0 * (fp.recon[i] - image.px[i]) * inv_n;
        dz4[i] = dr * fp.recon[i] * (1.0 - fp.recon[i]);
    }
    std::vector<double> da3(d.hidden, 0.0);
    affine_backward(p + d.dec_w2, fp.a3.data(), dz4.data(), d.input, d.hidden, scale,
                    g + d.dec_w2, g + d.dec_b2, da3.data());
    std::vector<double> dz3(d.hidden);
    for (int i = 0; i < d.hidden; ++i) dz3[i] = fp.z3[i] > 0.0 ? da3[i] : 0.0;
    std::vector<double> d_received(d.latent, 0.0);
    affine_backward(p + d.dec_w1, fp.received.data(), dz3.data(), d.hidden, d.latent, scale,
                    g + d.dec_w1, g + d.dec_b1, d_received.data());

    // classifier head
    double mx = std::max(fp.logits[0], fp.logits[1]);
    double e0 = std::exp(fp.logits[0] - mx), e1 = std::exp(fp.logits[1] - mx);
    double z = e0 + e1;
    double dlogits[2] = {lambda_cls * (e0 / z - (label == 0 ? 1.0 : 0.0)),
                         lambda_cls * (e1 / z - (label == 1 ? 1.0 : 0.0))};
    affine_backward(p + d.cls_w, fp.received.data(), dlogits, 2, d.latent, scale,
                    g + d.cls_w, g + d.cls_b, d_received.data());

    // channel: noise is a constant; the normalization Jacobian
    // c (I - latent latent^T / |latent|^2) is differentiated exactly.
    std::vector<double> d_latent(d.latent);
    if (fp.pass_through) {
        d_latent = d_received;
    } else {
        double dot = 0.0;
        for (int i = 0; i < d.latent; ++i) dot += fp.latent[i] * d_received[i];
        const double proj = dot / fp.latent_sumsq;
        for (int i = 0; i < d.latent; ++i)
            d_latent[i] = fp.norm_scale * (d_received[i] - proj * fp.latent[i]);
    }

    // encoder
    std::vector<double> da1(d.hidden, 0.0);
    affine_backward(p + d.enc_w2, fp.a1.data(), d_latent.data(), d.latent, d.hidden, scale,
                    g + d.enc_w2, g + d.enc_b2, da1.data());
    std::vector<double> dz1(d.hidden);
    for (int i = 0; i < d.hidden; ++i) dz1[i] = fp.z1[i] > 0.0 ? da1[i] : 0.0;
    affine_backward(p + d.enc_w1, image.px.data(), dz1.data(), d.hidden, d.input, scale,
                    g + d.enc_w1, g + d.enc_b1, nullptr);
}

ParamVector backward(const SemanticModel& m, const ForwardPass& fp, const Image& image,
                     int label, double lambda_cls, double scale) {
    ParamVector grad(m.dims.total, 0.0);
    backward_into(m, fp, image, label, lambda_cls, scale, grad);
    return grad;
}

ParamVector local_train(SemanticModel& m, const Dataset& data, const std::vector<int>& shard,
                        int iters, double lr, double lambda_cls, double snr_db, RngStream& rng) {
    if (shard.empty()) throw std::invalid_argument("MED holds no data");
    if (iters < 1) throw std::invalid_argument("local_train: iters must be >= 1");

    const ParamVector initial = m.params;
    const int batch = std::min<int>(16, static_cast<int>(shard.size()));
    std::vector<int> order = shard;
    ParamVector grad(m.dims.total);

    for (int it = 0; it < iters; ++it) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            const double inv_b = 1.0 / static_cast<double>(end - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = start; i < end; ++i) {
                const Example& ex = data.examples[order[i]];
                ForwardPass fp = forward(m, ex.image, snr_db, rng);
                backward_into(m, fp, ex.image, ex.label, lambda_cls, inv_b, grad);
            }
            for (int i = 0; i < m.dims.total; ++i) m.params[i] -= lr * grad[i];
        }
    }

    ParamVector delta(m.dims.total);
    for (int i = 0; i < m.dims.total; ++i) delta[i] = m.params[i] - initial[i];
    return delta;
}

}  // namespace dsfl
