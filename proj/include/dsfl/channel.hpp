#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsfl/rng.hpp"
#include "dsfl/types.hpp"

namespace dsfl {

// One per-link, per-round SNR realization.
struct ChannelDraw {
    double snr_db = 0.0;
    double snr_linear = 1.0;
};

double snr_db_to_linear(double snr_db);

// snr_db uniform on [lo, hi]. lo > hi is a precondition violation.
ChannelDraw sample_snr(RngStream& rng, double lo_db, double hi_db);

// Power-normalizes the symbols to unit mean power and adds white Gaussian
// noise with variance 10^(-snr_db/10). Throws "empty payload" / "zero-power
// signal" when normalization is undefined.
std::vector<double> awgn_transmit(const std::vector<double>& symbols, double snr_db,
                                  RngStream& rng);

// bandwidth_hz * log2(1 + snr_linear), in bits per second.
double shannon_rate(double bandwidth_hz, double snr_db);

// E = P * bits / rate. The caller records the result into the ledger.
double tx_energy(double bits, double power_w, double rate_bps);

// Joule accounting per (entity, round). Charges are appended in the
// orchestrator's fixed order, so totals are exact and reproducible.
class EnergyLedger {
public:
    struct Entry {
        std::string entity;
        std::uint64_t round;
        double joules;
    };

    void charge(const std::string& entity, std::uint64_t round, double joules);

    double entity_total(const std::string& entity) const;
    double round_total(std::uint64_t round) const;
    double grand_total() const;
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t entries_in_round(std::uint64_t round) const;

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, double> entity_total_;
    std::map<std::uint64_t, double> round_total_;
};

}  // namespace dsfl
