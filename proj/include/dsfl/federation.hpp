#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsfl/channel.hpp"
#include "dsfl/codec.hpp"
#include "dsfl/config.hpp"
#include "dsfl/data.hpp"
#include "dsfl/semantics.hpp"
#include "dsfl/topology.hpp"

namespace dsfl {

enum class Algo { kDsfl, kDfedavg, kQdfedavg };

std::string to_string(Algo a);
Algo parse_algo(const std::string& s);

enum class ExecPolicy { kSerial, kParallel };

// Symmetric doubly stochastic Metropolis weights over the BS graph.
struct MixingMatrix {
    int n = 0;
    std::vector<double> w;  // row-major n x n

    double at(int i, int j) const { return w[static_cast<std::size_t>(i) * n + j]; }
    double& at(int i, int j) { return w[static_cast<std::size_t>(i) * n + j]; }
};

MixingMatrix build_mixing_matrix(const Topology& t);

enum class AggWeights { kCounts, kSnr };

// One transmission's worth of accounting.
struct LinkCharge {
    std::string entity;
    double joules = 0.0;
    double cr = 0.0;       // fraction of parameters dropped (0 for dense algos)
    double snr_db = 0.0;
    std::int64_t bits = 0;
};

struct IntraResult {
    ParamVector aggregate;
    std::vector<LinkCharge> charges;
};

// Weighted aggregation of compressed MED deltas within one BS. Residuals
// are the per-sender error-feedback memories (ignored by dense algos).
IntraResult intra_bs_round(const std::vector<ParamVector>& deltas,
                           const std::vector<std::int64_t>& counts,
                           const std::vector<ChannelDraw>& snr,
                           std::vector<ParamVector>& residuals,
                           const std::vector<std::string>& sender_names,
                           const SimConfig& cfg, Algo algo, std::uint64_t round,
                           AggWeights weights = AggWeights::kCounts);

// Per-directed-edge gossip bookkeeping: the receiver-side estimate of the
// sender's parameters (mirrored at the sender) and the sender's
// error-feedback residual for that edge.
struct GossipState {
    std::vector<std::pair<int, int>> edges;  // directed (from, to), ascending
    std::vector<ParamVector> estimate;
    std::vector<ParamVector> residual;

    static GossipState init(const Topology& t, const ParamVector& initial_params);
    int edge_index(int from, int to) const;
};

// One synchronous consensus round: every BS compresses the difference
// between its params and what each neighbor last received, neighbors update
// their estimates, then every BS mixes x_i <- sum_j W[i][j] xhat_j (exact
// self term). bs_params is updated in place.
std::vector<LinkCharge> inter_bs_round(std::vector<ParamVector>& bs_params,
                                       const MixingMatrix& w, GossipState& gs,
                                       const std::vector<ChannelDraw>& edge_snr,
                                       const SimConfig& cfg, Algo algo, std::uint64_t round);

// One global round's metrics.
struct RoundRecord {
    int round = 0;
    Algo algo = Algo::kDsfl;
    std::uint64_t seed = 0;
    double psnr_mean_1db = 0.0;
    double psnr_mean_13db = 0.0;
    double ms_ssim_mean_1db = 0.0;
    double ms_ssim_mean_13db = 0.0;
    double accuracy = 0.0;  // mean over the two probe SNRs
    double energy_round_j = 0.0;
    double energy_cum_j = 0.0;
    double cr_mean = 0.0;
    double snr_mean_db = 0.0;
};

struct RunResult {
    std::vector<RoundRecord> records;
    EnergyLedger ledger;
};

// Evaluation probes (dB) used for every per-round test-set pass.
inline constexpr double kProbeSnrLowDb = 1.0;
inline constexpr double kProbeSnrHighDb = 13.0;

// Synthetic dataset size when dataset_source == "synthetic".
inline constexpr int kSyntheticDatasetSize = 226;

// Full two-layer experiment: local training, intra-BS aggregation,
// inter-BS consensus, per-round evaluation and energy accounting.
RunResult run_experiment(const SimConfig& cfg, Algo algo,
                         ExecPolicy policy = ExecPolicy::kParallel);

}  // namespace dsfl
