#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace dsfl {

// Deterministic random stream. Every stream is derived from
// (master seed, entity id, round, purpose), so a draw never depends on
// scheduling order: the same tuple always yields the same sequence, and
// work can fan out across threads without perturbing results.
//
// The generator is SplitMix64 over a keyed initial state. Uniform and
// normal transforms are implemented here rather than taken from
// <random> because the standard distributions are not bit-reproducible
// across library implementations.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double u01();

    // Uniform on [lo, hi]; lo == hi returns lo exactly.
    double uniform(double lo, double hi);

    // Standard normal via Box-Muller (pairs are cached).
    double normal();

    // Uniform integer in [0, n), n > 0.
    std::uint64_t next_below(std::uint64_t n);

    // Gamma(shape alpha, scale 1), Marsaglia-Tsang.
    double gamma(double alpha);

    // Symmetric Dirichlet(alpha) over k categories.
    std::vector<double> dirichlet(std::size_t k, double alpha);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_ = 0x9e3779b97f4a7c15ull;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Pure function of its inputs; distinct (entity, round, purpose) tuples
// give statistically independent streams for simulation purposes.
RngStream derive_rng(std::uint64_t master_seed, std::string_view entity,
                     std::uint64_t round, std::string_view purpose);

}  // namespace dsfl
