#include "dsfl/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dsfl {

int ceil_log2(int n) {
    if (n < 1) throw std::invalid_argument("ceil_log2: n must be positive");
    return static_cast<int>(std::bit_width(static_cast<unsigned>(n - 1)));
}

double compression_rate(double snr_db, const SimConfig& cfg) {
    const double span = cfg.snr_max_db - cfg.snr_min_db;
    double cr = cfg.cr_max -
                (cfg.cr_max - cfg.cr_min) * (snr_db - cfg.snr_min_db) / span;
    return std::clamp(cr, cfg.cr_min, cfg.cr_max);
}

SparseUpdate topk_compress(const ParamVector& v, double keep_fraction) {
    if (keep_fraction <= 0.0) throw std::invalid_argument("topk_compress: keep_fraction must be > 0");
    if (keep_fraction > 1.0) throw std::invalid_argument("topk_compress: keep_fraction must be <= 1");
    require_finite(v, "topk_compress");
    const int dim = static_cast<int>(v.size());
    if (dim == 0) throw std::invalid_argument("topk_compress: empty vector");

    const int k = std::max(1, static_cast<int>(std::floor(keep_fraction * dim)));

    std::vector<int> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    auto larger = [&v](int a, int b) {
        double ma = std::fabs(v[a]), mb = std::fabs(v[b]);
        if (ma != mb) return ma > mb;
        return a < b;  // tie: lower index wins
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), larger);
    order.resize(k);
    std::sort(order.begin(), order.end());

    SparseUpdate u;
    u.dim = dim;
    u.indices = std::move(order);
    u.values.reserve(k);
    for (int idx : u.indices) u.values.push_back(v[idx]);
    return u;
}

ParamVector apply_sparse(const SparseUpdate& u) {
    if (u.dim <= 0) throw std::invalid_argument("apply_sparse: bad dim");
    if (u.indices.size() != u.values.size())
        throw std::invalid_argument("apply_sparse: index/value length mismatch");
    ParamVector out(u.dim, 0.0);
    int prev = -1;
    for (std::size_t i = 0; i < u.indices.size(); ++i) {
        int idx = u.indices[i];
        if (idx <= prev || idx >= u.dim)
            throw std::invalid_argument("apply_sparse: malformed indices");
        prev = idx;
        out[idx] = u.values[i];
    }
    return out;
}

std::int64_t payload_bits(const SparseUpdate& u) {
    return static_cast<std::int64_t>(u.indices.size()) *
           (u.value_bits + ceil_log2(u.dim));
}

std::int64_t dense_payload_bits(int dim, int bits_per_value) {
    return static_cast<std::int64_t>(dim) * bits_per_value;
}

QuantizedVector quantize_uniform(const ParamVector& v, int bits, RngStream& rng) {
    if (bits < 1 || bits > 32) throw std::invalid_argument("quantize_uniform: bits in [1, 32]");
    require_finite(v, "quantize_uniform");
    if (v.empty()) throw std::invalid_argument("quantize_uniform: empty vector");

    QuantizedVector q;
    q.dim = static_cast<int>(v.size());
    q.bits = bits;
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    q.offset = *mn;
    const double range = *mx - *mn;
    const std::uint64_t max_code = (bits == 32) ? 0xffffffffull : ((1ull << bits) - 1);
    q.levels.resize(v.size());
    if (range == 0.0) {
        q.scale = 0.0;  // constant vector reconstructs exactly
        return q;
    }
    q.scale = range / static_cast<double>(max_code);
    for (std::size_t i = 0; i < v.size(); ++i) {
        double t = (v[i] - q.offset) / q.scale;
        double lo = std::floor(t);
        double frac = t - lo;
        std::uint64_t code = static_cast<std::uint64_t>(lo);
        if (rng.u01() < frac) ++code;
        if (code > max_code) code = max_code;
        q.levels[i] = static_cast<std::uint32_t>(code);
    }
    return q;
}

ParamVector dequantize(const QuantizedVector& q) {
    ParamVector out(q.dim);
    for (int i = 0; i < q.dim; ++i)
        out[i] = q.offset + static_cast<double>(q.levels[i]) * q.scale;
    return out;
}

SparseUpdate error_feedback_step(ParamVector& residual, const ParamVector& delta,
                                 double keep_fraction, bool use_feedback) {
    if (residual.size() != delta.size())
        throw std::invalid_argument("error_feedback_step: dim mismatch");
    if (!use_feedback) {
        return topk_compress(delta, keep_fraction);
    }
    ParamVector combined(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) combined[i] = residual[i] + delta[i];
    SparseUpdate u = topk_compress(combined, keep_fraction);
    residual = std::move(combined);
    for (int idx : u.indices) residual[idx] = 0.0;  // transmitted mass leaves the memory
    return u;
}

}  // namespace dsfl
