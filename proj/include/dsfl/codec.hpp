#pragma once

#include <cstdint>
#include <vector>

#include "dsfl/config.hpp"
#include "dsfl/rng.hpp"
#include "dsfl/types.hpp"

namespace dsfl {

// Top-k compressed parameter delta.
struct SparseUpdate {
    int dim = 0;
    std::vector<int> indices;     // strictly ascending, in [0, dim)
    std::vector<double> values;   // same length as indices
    int value_bits = 32;
};

// Uniform quantization codes; dequantized value = offset + code * scale.
struct QuantizedVector {
    int dim = 0;
    std::vector<std::uint32_t> levels;
    double scale = 0.0;
    double offset = 0.0;
    int bits = 8;
};

int ceil_log2(int n);

// Fraction of parameters to DROP at the given SNR: linear from cr_max at
// snr_min_db down to cr_min at snr_max_db, clamped. Keep fraction is 1 - cr.
double compression_rate(double snr_db, const SimConfig& cfg);

// Keeps the k = max(1, floor(keep_fraction * dim)) entries of largest
// magnitude; ties go to the smaller index. Values are preserved exactly.
SparseUpdate topk_compress(const ParamVector& v, double keep_fraction);

ParamVector apply_sparse(const SparseUpdate& u);

// k * (value_bits + ceil(log2 dim)). Honest accounting: at k == dim this
// exceeds the dense cost.
std::int64_t payload_bits(const SparseUpdate& u);
std::int64_t dense_payload_bits(int dim, int bits_per_value = 32);

// Unbiased stochastic rounding onto 2^bits - 1 equal steps of [min, max].
QuantizedVector quantize_uniform(const ParamVector& v, int bits, RngStream& rng);
ParamVector dequantize(const QuantizedVector& q);

// Compresses residual + delta; what was not transmitted stays in the
// residual for later rounds. With use_feedback == false the residual is
// left untouched (all-zero by contract) and only delta is compressed.
SparseUpdate error_feedback_step(ParamVector& residual, const ParamVector& delta,
                                 double keep_fraction, bool use_feedback = true);

}  // namespace dsfl
