#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dsfl {

enum class TopologyKind { kRing, kPath, kComplete };

std::string to_string(TopologyKind k);
TopologyKind parse_topology_kind(const std::string& s);

// Full simulation configuration. Field names double as the keys of the
// `key = value` config file format.
struct SimConfig {
    std::uint64_t seed = 0;
    int n_bs = 3;
    int total_meds = 20;
    TopologyKind topology_kind = TopologyKind::kComplete;
    double snr_min_db = 0.1;
    double snr_max_db = 20.0;
    double power_w = 0.1;
    double bandwidth_hz = 1e6;
    double cr_min = 0.7;
    double cr_max = 0.97;
    int quant_bits = 8;
    int local_iters = 5;
    int rounds = 100;
    double lr = 0.4;
    int latent_dim = 32;
    int image_size = 16;
    double lambda_cls = 0.05;
    double dirichlet_alpha = 0.3;
    bool error_feedback = true;
    std::string dataset_source = "synthetic";

    bool operator==(const SimConfig&) const = default;
};

// Shortest round-trip decimal rendering (also used for CSV output).
std::string format_double(double v);

// Returns the violated invariants by name; empty means the config is valid.
std::vector<std::string> validate_config(const SimConfig& cfg);

// Flat `key = value` text, one line per field, declaration order.
std::string serialize_config(const SimConfig& cfg);

// Parses the config file format. `#` starts a comment, blank lines are
// skipped, unknown or duplicate keys are errors.
SimConfig parse_config(const std::string& text);
SimConfig load_config_file(const std::string& path);

}  // namespace dsfl
