#include "dsfl/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace dsfl {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

std::uint64_t fnv1a_bytes(std::uint64_t h, const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t fnv1a_u64(std::uint64_t h, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    return fnv1a_bytes(h, b, 8);
}

std::uint64_t splitmix_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return splitmix_mix(state_);
}

double RngStream::u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * u01();
}

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be positive");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double RngStream::gamma(double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("gamma: alpha must be positive");
    if (alpha < 1.0) {
        // Boost from alpha + 1.
        double u = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    double d = alpha - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = u01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> RngStream::dirichlet(std::size_t k, double alpha) {
    std::vector<double> p(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        p[i] = gamma(alpha);
        sum += p[i];
    }
    if (sum <= 0.0) {
        // All-zero gammas can only happen by underflow at tiny alpha.
        for (std::size_t i = 0; i < k; ++i) p[i] = 1.0 / static_cast<double>(k);
        return p;
    }
    for (std::size_t i = 0; i < k; ++i) p[i] /= sum;
    return p;
}

RngStream derive_rng(std::uint64_t master_seed, std::string_view entity,
                     std::uint64_t round, std::string_view purpose) {
    std::uint64_t h = kFnvOffset;
    h = fnv1a_u64(h, master_seed);
    h = fnv1a_bytes(h, entity.data(), entity.size());
    h = fnv1a_bytes(h, "\x1f", 1);
    h = fnv1a_u64(h, round);
    h = fnv1a_bytes(h, "\x1f", 1);
    h = fnv1a_bytes(h, purpose.data(), purpose.size());
    return RngStream(splitmix_mix(h));
}

}  // namespace dsfl
