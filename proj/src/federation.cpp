#include "dsfl/federation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dsfl/metrics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dsfl {

std::string to_string(Algo a) {
    switch (a) {
        case Algo::kDsfl: return "dsfl";
        case Algo::kDfedavg: return "dfedavg";
        case Algo::kQdfedavg: return "qdfedavg";
    }
    return "dsfl";
}

Algo parse_algo(const std::string& s) {
    if (s == "dsfl") return Algo::kDsfl;
    if (s == "dfedavg") return Algo::kDfedavg;
    if (s == "qdfedavg") return Algo::kQdfedavg;
    throw std::invalid_argument("unknown algo '" + s + "'");
}

MixingMatrix build_mixing_matrix(const Topology& t) {
    if (!is_connected(t.n_bs, t.bs_edges))
        throw std::invalid_argument("consensus impossible: BS graph disconnected");
    MixingMatrix m;
    m.n = t.n_bs;
    m.w.assign(static_cast<std::size_t>(m.n) * m.n, 0.0);
    std::vector<int> deg(m.n);
    for (int i = 0; i < m.n; ++i) deg[i] = t.degree_of(i);
    for (const auto& [a, b] : t.bs_edges) {
        double w = 1.0 / (1.0 + std::max(deg[a], deg[b]));
        m.at(a, b) = w;
        m.at(b, a) = w;
    }
    for (int i = 0; i < m.n; ++i) {
        double off = 0.0;
        for (int j = 0; j < m.n; ++j)
            if (j != i) off += m.at(i, j);
        m.at(i, i) = 1.0 - off;
    }
    return m;
}

namespace {

struct Encoded {
    ParamVector recon;
    std::int64_t bits = 0;
    double cr = 0.0;
};

// The payload a link actually carries, by algorithm: top-k of
// residual+delta for dsfl, the raw vector for dfedavg, a stochastically
// quantized dense vector for qdfedavg. `recon` is what the receiver sees.
Encoded encode_update(const ParamVector& payload, ParamVector& residual, double snr_db,
                      const SimConfig& cfg, Algo algo, RngStream quant_rng) {
    Encoded e;
    switch (algo) {
        case Algo::kDsfl: {
            e.cr = compression_rate(snr_db, cfg);
            SparseUpdate u = error_feedback_step(residual, payload, 1.0 - e.cr,
                                                 cfg.error_feedback);
            e.recon = apply_sparse(u);
            e.bits = payload_bits(u);
            break;
        }
        case Algo::kDfedavg: {
            e.recon = payload;
            e.bits = dense_payload_bits(static_cast<int>(payload.size()), 32);
            break;
        }
        case Algo::kQdfedavg: {
            QuantizedVector q = quantize_uniform(payload, cfg.quant_bits, quant_rng);
            e.recon = dequantize(q);
            e.bits = dense_payload_bits(static_cast<int>(payload.size()), cfg.quant_bits);
            break;
        }
    }
    return e;
}

}  // namespace

IntraResult intra_bs_round(const std::vector<ParamVector>& deltas,
                           const std::vector<std::int64_t>& counts,
                           const std::vector<ChannelDraw>& snr,
                           std::vector<ParamVector>& residuals,
                           const std::vector<std::string>& sender_names,
                           const SimConfig& cfg, Algo algo, std::uint64_t round,
                           AggWeights weights) {
    if (deltas.empty()) throw std::invalid_argument("intra_bs_round: empty MED set");
    if (deltas.size() != counts.size() || deltas.size() != snr.size() ||
        deltas.size() != residuals.size() || deltas.size() != sender_names.size())
        throw std::invalid_argument("intra_bs_round: argument length mismatch");

    const std::size_t dim = deltas[0].size();
    double wsum = 0.0;
    std::vector<double> w(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        w[i] = (weights == AggWeights::kCounts) ? static_cast<double>(counts[i])
                                                : snr[i].snr_linear;
        wsum += w[i];
    }

    IntraResult out;
    out.aggregate.assign(dim, 0.0);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (deltas[i].size() != dim)
            throw std::invalid_argument("intra_bs_round: delta dim mismatch");
        Encoded e = encode_update(deltas[i], residuals[i], snr[i].snr_db, cfg, algo,
                                  derive_rng(cfg.seed, sender_names[i], round, "quant"));
        const double weight = w[i] / wsum;
        for (std::size_t j = 0; j < dim; ++j) out.aggregate[j] += weight * e.recon[j];

        LinkCharge c;
        c.entity = sender_names[i];
        c.cr = e.cr;
        c.snr_db = snr[i].snr_db;
        c.bits = e.bits;
        c.joules = tx_energy(static_cast<double>(e.bits), cfg.power_w,
                             shannon_rate(cfg.bandwidth_hz, snr[i].snr_db));
        out.charges.push_back(std::move(c));
    }
    return out;
}

GossipState GossipState::init(const Topology& t, const ParamVector& initial_params) {
    GossipState gs;
    for (const auto& [a, b] : t.bs_edges) {
        gs.edges.emplace_back(a, b);
        gs.edges.emplace_back(b, a);
    }
    std::sort(gs.edges.begin(), gs.edges.end());
    gs.estimate.assign(gs.edges.size(), initial_params);
    gs.residual.assign(gs.edges.size(), ParamVector(initial_params.size(), 0.0));
    return gs;
}

int GossipState::edge_index(int from, int to) const {
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].first == from && edges[i].second == to) return static_cast<int>(i);
    return -1;
}

std::vector<LinkCharge> inter_bs_round(std::vector<ParamVector>& bs_params,
                                       const MixingMatrix& w, GossipState& gs,
                                       const std::vector<ChannelDraw>& edge_snr,
                                       const SimConfig& cfg, Algo algo, std::uint64_t round) {
    if (edge_snr.size() != gs.edges.size())
        throw std::invalid_argument("inter_bs_round: SNR draws do not match edges");
    const int n = static_cast<int>(bs_params.size());
    const std::size_t dim = n > 0 ? bs_params[0].size() : 0;
    for (const auto& p : bs_params)
        if (p.size() != dim) throw std::invalid_argument("inter_bs_round: dim mismatch");

    std::vector<LinkCharge> charges;
    for (std::size_t e = 0; e < gs.edges.size(); ++e) {
        const auto [from, to] = gs.edges[e];
        ParamVector diff(dim);
        for (std::size_t j = 0; j < dim; ++j) diff[j] = bs_params[from][j] - gs.estimate[e][j];

        std::string edge_name = "bs:" + std::to_string(from) + "->" + std::to_string(to);
        Encoded enc = encode_update(diff, gs.residual[e], edge_snr[e].snr_db, cfg, algo,
                                    derive_rng(cfg.seed, edge_name, round, "quant"));
        for (std::size_t j = 0; j < dim; ++j) gs.estimate[e][j] += enc.recon[j];

        LinkCharge c;
        c.entity = "bs:" + std::to_string(from);
        c.cr = enc.cr;
        c.snr_db = edge_snr[e].snr_db;
        c.bits = enc.bits;
        c.joules = tx_energy(static_cast<double>(enc.bits), cfg.power_w,
                             shannon_rate(cfg.bandwidth_hz, edge_snr[e].snr_db));
        charges.push_back(std::move(c));
    }

    // Synchronous mixing step on the updated estimates; exact self term.
    std::vector<ParamVector> mixed(n, ParamVector(dim, 0.0));
    for (int i = 0; i < n; ++i) {
        const double wii = w.at(i, i);
        for (std::size_t k = 0; k < dim; ++k) mixed[i][k] = wii * bs_params[i][k];
        for (int j = 0; j < n; ++j) {
            if (j == i || w.at(i, j) == 0.0) continue;
            int e = gs.edge_index(j, i);
            if (e < 0) throw std::logic_error("inter_bs_round: weight without edge");
            const double wij = w.at(i, j);
            for (std::size_t k = 0; k < dim; ++k) mixed[i][k] += wij * gs.estimate[e][k];
        }
    }
    bs_params = std::move(mixed);
    return charges;
}

namespace {

struct ProbeStats {
    double psnr_sum = 0.0;
    double ms_ssim_sum = 0.0;
    std::int64_t correct = 0;
};

ProbeStats evaluate_probe(const SemanticModel& model, const Dataset& data,
                          const std::vector<int>& test_idx, double probe_db,
                          const SimConfig& cfg, int bs, std::uint64_t round,
                          ExecPolicy policy) {
    const int nt = static_cast<int>(test_idx.size());
    std::vector<double> psnrs(nt), msims(nt);
    std::vector<char> hit(nt, 0);
    const std::string probe_tag = "probe" + format_double(probe_db) + "db";

    std::string error;
    auto eval_one = [&](int s) {
        try {
            const Example& ex = data.examples[test_idx[s]];
            RngStream rng = derive_rng(cfg.seed,
                                       "eval:bs" + std::to_string(bs) + ":s" + std::to_string(s),
                                       round, probe_tag);
            ForwardPass fp = forward(model, ex.image, probe_db, rng);
            Image recon{ex.image.side, fp.recon};
            psnrs[s] = psnr(recon, ex.image, 1.0);
            msims[s] = ms_ssim(recon, ex.image, 1.0);
            int pred = fp.logits[1] > fp.logits[0] ? 1 : 0;
            hit[s] = (pred == ex.label) ? 1 : 0;
        } catch (const std::exception& e) {
            // exceptions may not cross the parallel region
#pragma omp critical
            if (error.empty()) error = e.what();
        }
    };

    if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
        for (int s = 0; s < nt; ++s) eval_one(s);
    } else {
        for (int s = 0; s < nt; ++s) eval_one(s);
    }
    if (!error.empty()) throw std::runtime_error(error);

    ProbeStats st;
    for (int s = 0; s < nt; ++s) {
        st.psnr_sum += psnrs[s];
        st.ms_ssim_sum += msims[s];
        st.correct += hit[s];
    }
    return st;
}

// Exact convexity check of the per-BS label mixtures: each BS-level TV
// distance to the global label distribution must not exceed the max over
// its MEDs. Compared in integer arithmetic so ties cannot flip.
void assert_bs_mixture_convexity(const std::vector<int>& labels,
                                 const std::vector<std::vector<int>>& med_shards,
                                 const Topology& topo, int n_classes) {
    const std::int64_t n_total = static_cast<std::int64_t>(labels.size());
    std::vector<std::int64_t> global_counts(n_classes, 0);
    for (int l : labels) global_counts[l]++;

    auto tv_numerator = [&](const std::vector<std::int64_t>& counts, std::int64_t n) {
        // TV = sum_c |c_c * N - g_c * n| / (2 n N); return the numerator.
        std::int64_t num = 0;
        for (int c = 0; c < n_classes; ++c)
            num += std::llabs(counts[c] * n_total - global_counts[c] * n);
        return num;
    };

    for (int b = 0; b < topo.n_bs; ++b) {
        std::vector<std::int64_t> bs_counts(n_classes, 0);
        std::int64_t bs_n = 0;
        std::int64_t best_num = 0, best_n = 1;
        bool any = false;
        for (int m = 0; m < static_cast<int>(med_shards.size()); ++m) {
            if (topo.med_assignment[m] != b) continue;
            std::vector<std::int64_t> counts(n_classes, 0);
            for (int idx : med_shards[m]) counts[labels[idx]]++;
            std::int64_t n = static_cast<std::int64_t>(med_shards[m].size());
            for (int c = 0; c < n_classes; ++c) bs_counts[c] += counts[c];
            bs_n += n;
            std::int64_t num = tv_numerator(counts, n);
            // num/n > best_num/best_n ?
            if (!any || num * best_n > best_num * n) {
                best_num = num;
                best_n = n;
                any = true;
            }
        }
        if (!any) continue;
        std::int64_t bs_num = tv_numerator(bs_counts, bs_n);
        // bs_num/bs_n <= best_num/best_n must hold exactly.
        if (bs_num * best_n > best_num * bs_n)
            throw std::logic_error("BS label mixture exceeds max MED divergence");
    }
}

}  // namespace

RunResult run_experiment(const SimConfig& cfg, Algo algo, ExecPolicy policy) {
    {
        auto bad = validate_config(cfg);
        if (!bad.empty()) {
            std::string msg = "invalid config:";
            for (const auto& b : bad) msg += " [" + b + "]";
            throw std::invalid_argument(msg);
        }
    }

    // Dataset and 80/20 split.
    Dataset data;
    if (cfg.dataset_source == "synthetic") {
        RngStream rng = derive_rng(cfg.seed, "data", 0, "synthetic");
        data = gen_synthetic(kSyntheticDatasetSize, cfg.image_size, rng);
    } else {
        data = load_pgm_directory(cfg.dataset_source, cfg.image_size);
    }
    const int n = static_cast<int>(data.examples.size());
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    {
        RngStream rng = derive_rng(cfg.seed, "data", 0, "split");
        rng.shuffle(all);
    }
    const int n_train = (n * 8) / 10;
    std::vector<int> train_idx(all.begin(), all.begin() + n_train);
    std::vector<int> test_idx(all.begin() + n_train, all.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    if (n_train < cfg.total_meds)
        throw std::runtime_error("not enough training examples for the MED count");

    // Non-IID shards.
    std::vector<int> train_labels(n_train);
    for (int i = 0; i < n_train; ++i) train_labels[i] = data.examples[train_idx[i]].label;
    Partition part;
    {
        RngStream rng = derive_rng(cfg.seed, "data", 0, "partition");
        part = partition_dirichlet(train_labels, cfg.total_meds, cfg.dirichlet_alpha, rng);
    }
    std::vector<std::vector<int>> shards(cfg.total_meds);
    for (int m = 0; m < cfg.total_meds; ++m)
        for (int pos : part.shards[m]) shards[m].push_back(train_idx[pos]);

    // Topology, mixing weights, shared initial model.
    Topology topo;
    {
        RngStream rng = derive_rng(cfg.seed, "topology", 0, "assign");
        topo = build_topology(cfg, rng);
    }
    int n_classes = static_cast<int>(data.class_counts.size());
    assert_bs_mixture_convexity(train_labels, part.shards, topo, n_classes);
    MixingMatrix w = build_mixing_matrix(topo);

    SemanticModel model0;
    {
        RngStream rng = derive_rng(cfg.seed, "model", 0, "init");
        model0 = init_model(cfg, rng);
    }
    const int dim = model0.dims.total;

    std::vector<ParamVector> bs_params(cfg.n_bs, model0.params);
    GossipState gossip = GossipState::init(topo, model0.params);
    std::vector<ParamVector> med_residuals(cfg.total_meds, ParamVector(dim, 0.0));

    std::vector<std::vector<int>> bs_meds(cfg.n_bs);
    for (int m = 0; m < cfg.total_meds; ++m) bs_meds[topo.med_assignment[m]].push_back(m);

    RunResult result;
    double energy_cum = 0.0;

    for (int round = 1; round <= cfg.rounds; ++round) {
        const auto r = static_cast<std::uint64_t>(round);
        try {

            // Per-link SNR realizations for this round.
            std::vector<ChannelDraw> med_snr(cfg.total_meds);
            for (int m = 0; m < cfg.total_meds; ++m) {
                RngStream rng = derive_rng(cfg.seed, "med:" + std::to_string(m), r, "snr");
                med_snr[m] = sample_snr(rng, cfg.snr_min_db, cfg.snr_max_db);
            }
            std::vector<ChannelDraw> edge_snr(gossip.edges.size());
            for (std::size_t e = 0; e < gossip.edges.size(); ++e) {
                const auto [from, to] = gossip.edges[e];
                RngStream rng = derive_rng(
                    cfg.seed, "bs:" + std::to_string(from) + "->" + std::to_string(to), r, "snr");
                edge_snr[e] = sample_snr(rng, cfg.snr_min_db, cfg.snr_max_db);
            }

            // (1) Local training, fanned out across MEDs. Each MED owns a
            // derived stream, so the schedule cannot change the results.
            std::vector<ParamVector> deltas(cfg.total_meds);
            std::string train_error;
            auto train_one = [&](int m) {
                try {
                    SemanticModel local{model0.dims, bs_params[topo.med_assignment[m]]};
                    RngStream rng = derive_rng(cfg.seed, "med:" + std::to_string(m), r, "train");
                    deltas[m] = local_train(local, data, shards[m], cfg.local_iters, cfg.lr,
                                            cfg.lambda_cls, med_snr[m].snr_db, rng);
            } catch (const std::exception& e) {
#pragma omp critical
                if (train_error.empty())
                    train_error = "med:" + std::to_string(m) + ": " + e.what();
            }
        };
        if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(dynamic)
            for (int m = 0; m < cfg.total_meds; ++m) train_one(m);
        } else {
            for (int m = 0; m < cfg.total_meds; ++m) train_one(m);
        }
        if (!train_error.empty()) throw std::runtime_error(train_error);

        // (2)+(3) Intra-BS aggregation, then apply the aggregate delta.
        std::vector<LinkCharge> med_charges(cfg.total_meds);
        double cr_sum = 0.0;
        std::int64_t link_count = 0;
        for (int b = 0; b < cfg.n_bs; ++b) {
            std::vector<ParamVector> b_deltas;
            std::vector<std::int64_t> b_counts;
            std::vector<ChannelDraw> b_snr;
            std::vector<ParamVector> b_res;
            std::vector<std::string> b_names;
            for (int m : bs_meds[b]) {
                b_deltas.push_back(std::move(deltas[m]));
                b_counts.push_back(static_cast<std::int64_t>(shards[m].size()));
                b_snr.push_back(med_snr[m]);
                b_res.push_back(std::move(med_residuals[m]));
                b_names.push_back("med:" + std::to_string(m));
            }
            IntraResult agg =
                intra_bs_round(b_deltas, b_counts, b_snr, b_res, b_names, cfg, algo, r);
            for (std::size_t i = 0; i < bs_meds[b].size(); ++i) {
                med_residuals[bs_meds[b][i]] = std::move(b_res[i]);
                med_charges[bs_meds[b][i]] = agg.charges[i];
            }
            for (int j = 0; j < dim; ++j) bs_params[b][j] += agg.aggregate[j];
        }
        for (int m = 0; m < cfg.total_meds; ++m) {  // ledger in ascending entity order
            result.ledger.charge(med_charges[m].entity, r, med_charges[m].joules);
            cr_sum += med_charges[m].cr;
            ++link_count;
        }

        // (4) Inter-BS consensus.
        auto bs_charges = inter_bs_round(bs_params, w, gossip, edge_snr, cfg, algo, r);
        for (const auto& c : bs_charges) {
            result.ledger.charge(c.entity, r, c.joules);
            cr_sum += c.cr;
            ++link_count;
        }

        // (5) Evaluation at the two probe SNRs.
        RoundRecord rec;
        rec.round = round;
        rec.algo = algo;
        rec.seed = cfg.seed;
        const int nt = static_cast<int>(test_idx.size());
        double acc_sum = 0.0;
        for (int b = 0; b < cfg.n_bs; ++b) {
            SemanticModel m{model0.dims, bs_params[b]};
            ProbeStats lo = evaluate_probe(m, data, test_idx, kProbeSnrLowDb, cfg, b, r, policy);
            ProbeStats hi = evaluate_probe(m, data, test_idx, kProbeSnrHighDb, cfg, b, r, policy);
            rec.psnr_mean_1db += lo.psnr_sum / nt;
            rec.psnr_mean_13db += hi.psnr_sum / nt;
            rec.ms_ssim_mean_1db += lo.ms_ssim_sum / nt;
            rec.ms_ssim_mean_13db += hi.ms_ssim_sum / nt;
            acc_sum += 0.5 * (static_cast<double>(lo.correct) / nt +
                              static_cast<double>(hi.correct) / nt);
        }
        rec.psnr_mean_1db /= cfg.n_bs;
        rec.psnr_mean_13db /= cfg.n_bs;
        rec.ms_ssim_mean_1db /= cfg.n_bs;
        rec.ms_ssim_mean_13db /= cfg.n_bs;
        rec.accuracy = acc_sum / cfg.n_bs;

        double snr_sum = 0.0;
        for (const auto& d : med_snr) snr_sum += d.snr_db;
        for (const auto& d : edge_snr) snr_sum += d.snr_db;
        rec.snr_mean_db = snr_sum / static_cast<double>(med_snr.size() + edge_snr.size());
        rec.cr_mean = link_count > 0 ? cr_sum / static_cast<double>(link_count) : 0.0;
        rec.energy_round_j = result.ledger.round_total(r);
        energy_cum += rec.energy_round_j;
        rec.energy_cum_j = energy_cum;
        result.records.push_back(rec);

        } catch (const std::exception& e) {
            throw std::runtime_error("round " + std::to_string(round) + ": " + e.what());
        }
    }
    return result;
}

}  // namespace dsfl
