#include "dsfl/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace dsfl {

double snr_db_to_linear(double snr_db) {
    return std::pow(10.0, snr_db / 10.0);
}

ChannelDraw sample_snr(RngStream& rng, double lo_db, double hi_db) {
    if (lo_db > hi_db) throw std::invalid_argument("sample_snr: lo > hi");
    ChannelDraw d;
    d.snr_db = rng.uniform(lo_db, hi_db);
    d.snr_linear = snr_db_to_linear(d.snr_db);
    return d;
}

std::vector<double> awgn_transmit(const std::vector<double>& symbols, double snr_db,
                                  RngStream& rng) {
    if (symbols.empty()) throw std::invalid_argument("empty payload");
    double sumsq = 0.0;
    for (double x : symbols) sumsq += x * x;
    if (sumsq == 0.0) throw std::invalid_argument("zero-power signal");

    const double n = static_cast<double>(symbols.size());
    const double scale = std::sqrt(n / sumsq);
    const double sigma = std::sqrt(std::pow(10.0, -snr_db / 10.0));

    std::vector<double> out(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i)
        out[i] = symbols[i] * scale + sigma * rng.normal();
    return out;
}

double shannon_rate(double bandwidth_hz, double snr_db) {
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("shannon_rate: bandwidth must be positive");
    return bandwidth_hz * std::log2(1.0 + snr_db_to_linear(snr_db));
}

double tx_energy(double bits, double power_w, double rate_bps) {
    if (bits < 0.0) throw std::invalid_argument("tx_energy: negative bit count");
    if (rate_bps <= 0.0) throw std::invalid_argument("tx_energy: rate must be positive");
    return power_w * bits / rate_bps;
}

void EnergyLedger::charge(const std::string& entity, std::uint64_t round, double joules) {
    if (joules < 0.0 || !std::isfinite(joules))
        throw std::invalid_argument("charge: joules must be finite and >= 0");
    entries_.push_back(Entry{entity, round, joules});
    entity_total_[entity] += joules;
    round_total_[round] += joules;
}

double EnergyLedger::entity_total(const std::string& entity) const {
    auto it = entity_total_.find(entity);
    return it == entity_total_.end() ? 0.0 : it->second;
}

double EnergyLedger::round_total(std::uint64_t round) const {
    auto it = round_total_.find(round);
    return it == round_total_.end() ? 0.0 : it->second;
}

double EnergyLedger::grand_total() const {
    double t = 0.0;
    for (const auto& e : entries_) t += e.joules;
    return t;
}

std::size_t EnergyLedger::entries_in_round(std::uint64_t round) const {
    std::size_t n = 0;
    for (const auto& e : entries_)
        if (e.round == round) ++n;
    return n;
}

}  // namespace dsfl
