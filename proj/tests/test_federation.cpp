#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "dsfl/cli.hpp"
#include "dsfl/federation.hpp"
#include "oracles.hpp"

using namespace dsfl;

namespace {

Topology path3() {
    Topology t;
    t.n_bs = 3;
    t.bs_edges = {{0, 1}, {1, 2}};
    t.med_assignment = {0, 1, 2};
    return t;
}

Topology complete3() {
    Topology t;
    t.n_bs = 3;
    t.bs_edges = {{0, 1}, {0, 2}, {1, 2}};
    t.med_assignment = {0, 1, 2};
    return t;
}

SimConfig fast_cfg(std::uint64_t seed = 0) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.rounds = 2;
    cfg.image_size = 8;
    cfg.latent_dim = 8;
    cfg.total_meds = 6;
    return cfg;
}

double max_pairwise_distance(const std::vector<ParamVector>& xs) {
    double best = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < xs[i].size(); ++k) {
                double e = xs[i][k] - xs[j][k];
                d += e * e;
            }
            best = std::max(best, std::sqrt(d));
        }
    return best;
}

}  // namespace

TEST_CASE("metropolis weights on the reference graphs") {
    MixingMatrix mc = build_mixing_matrix(complete3());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(mc.at(i, j) == doctest::Approx(1.0 / 3).epsilon(1e-15));

    MixingMatrix mp = build_mixing_matrix(path3());
    CHECK(mp.at(0, 0) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(mp.at(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(mp.at(0, 2) == 0.0);
    CHECK(mp.at(1, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(mp.at(1, 2) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(mp.at(2, 2) == doctest::Approx(2.0 / 3).epsilon(1e-15));

    Topology disconnected;
    disconnected.n_bs = 3;
    disconnected.bs_edges = {{0, 1}};
    CHECK_THROWS_WITH_AS(build_mixing_matrix(disconnected), doctest::Contains("consensus impossible"),
                         std::invalid_argument);
}

TEST_CASE("metropolis rows and columns sum to one on random connected graphs") {
    RngStream rng = derive_rng(1, "fed", 0, "graphs");
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(7));
        Topology t;
        t.n_bs = n;
        for (int i = 0; i + 1 < n; ++i) t.bs_edges.push_back({i, i + 1});  // spanning path
        for (int i = 0; i < n; ++i)
            for (int j = i + 2; j < n; ++j)
                if (rng.u01() < 0.3) t.bs_edges.push_back({i, j});
        MixingMatrix w = build_mixing_matrix(t);
        for (int i = 0; i < n; ++i) {
            double row = 0.0, col = 0.0;
            for (int j = 0; j < n; ++j) {
                row += w.at(i, j);
                col += w.at(j, i);
                CHECK(w.at(i, j) == w.at(j, i));
            }
            CHECK(std::fabs(row - 1.0) < 1e-12);
            CHECK(std::fabs(col - 1.0) < 1e-12);
        }
        CHECK(oracle::lambda2(w.w, n) < 1.0);
    }
}

TEST_CASE("intra-BS aggregation examples") {
    SimConfig cfg;
    ChannelDraw top{cfg.snr_max_db, snr_db_to_linear(cfg.snr_max_db)};

    // one MED at keep = 1 (dfedavg path): aggregate == its delta
    {
        std::vector<ParamVector> deltas{{1.0, -2.0, 3.0}};
        std::vector<ParamVector> res{ParamVector(3, 0.0)};
        auto out = intra_bs_round(deltas, {4}, {top}, res, {"med:0"}, cfg, Algo::kDfedavg, 1);
        CHECK(out.aggregate == deltas[0]);
        CHECK(out.charges.size() == 1);
        CHECK(out.charges[0].bits == 3 * 32);
    }

    // counts 1 and 3 with dense deltas [0...] and [4...]: weighted mean [3...]
    {
        std::vector<ParamVector> deltas{ParamVector(4, 0.0), ParamVector(4, 4.0)};
        std::vector<ParamVector> res{ParamVector(4, 0.0), ParamVector(4, 0.0)};
        auto out = intra_bs_round(deltas, {1, 3}, {top, top}, res, {"med:0", "med:1"}, cfg,
                                  Algo::kDfedavg, 1);
        for (double x : out.aggregate) CHECK(x == 3.0);
    }

    // all MEDs at snr_max with cr_min = 0: dsfl equals the uncompressed mean exactly
    {
        SimConfig loose = cfg;
        loose.cr_min = 0.0;
        std::vector<ParamVector> deltas{{1.0, 2.0, -1.0}, {3.0, 0.0, 5.0}};
        std::vector<ParamVector> res{ParamVector(3, 0.0), ParamVector(3, 0.0)};
        auto dsfl_out = intra_bs_round(deltas, {2, 2}, {top, top}, res, {"med:0", "med:1"},
                                       loose, Algo::kDsfl, 1);
        std::vector<ParamVector> res2{ParamVector(3, 0.0), ParamVector(3, 0.0)};
        auto dense_out = intra_bs_round(deltas, {2, 2}, {top, top}, res2, {"med:0", "med:1"},
                                        loose, Algo::kDfedavg, 1);
        CHECK(dsfl_out.aggregate == dense_out.aggregate);
        CHECK(dsfl_out.charges[0].cr == 0.0);
    }

    std::vector<ParamVector> none;
    std::vector<ParamVector> res;
    CHECK_THROWS(intra_bs_round(none, {}, {}, res, {}, cfg, Algo::kDsfl, 1));
}

TEST_CASE("snr-weighted aggregation mode") {
    SimConfig cfg;
    ChannelDraw weak{0.0, 1.0};
    ChannelDraw strong{10.0 * std::log10(3.0), 3.0};
    std::vector<ParamVector> deltas{{0.0}, {4.0}};
    std::vector<ParamVector> res{ParamVector(1, 0.0), ParamVector(1, 0.0)};
    auto out = intra_bs_round(deltas, {1, 1}, {weak, strong}, res, {"med:0", "med:1"}, cfg,
                              Algo::kDfedavg, 1, AggWeights::kSnr);
    CHECK(out.aggregate[0] == doctest::Approx(3.0).epsilon(1e-12));  // weights 1/4, 3/4
}

TEST_CASE("inter-BS: consensus fixed point") {
    SimConfig cfg;
    Topology t = path3();
    MixingMatrix w = build_mixing_matrix(t);
    ParamVector common{1.5, -2.0, 0.25};
    std::vector<ParamVector> params(3, common);
    GossipState gs = GossipState::init(t, common);
    std::vector<ChannelDraw> snr(gs.edges.size(), ChannelDraw{10.0, 10.0});

    auto charges = inter_bs_round(params, w, gs, snr, cfg, Algo::kDsfl, 1);
    CHECK(charges.size() == 4);  // two undirected edges, both directions
    for (int b = 0; b < 3; ++b)
        for (int k = 0; k < 3; ++k)
            CHECK(params[b][k] == doctest::Approx(common[k]).epsilon(1e-12));
    for (const auto& r : gs.residual)
        for (double x : r) CHECK(x == 0.0);
}

TEST_CASE("inter-BS: one dense step on the 3-path is the matrix product") {
    SimConfig cfg;
    Topology t = path3();
    MixingMatrix w = build_mixing_matrix(t);
    std::vector<ParamVector> params{{0.0}, {3.0}, {6.0}};
    GossipState gs = GossipState::init(t, ParamVector(1, 0.0));
    std::vector<ChannelDraw> snr(gs.edges.size(), ChannelDraw{10.0, 10.0});

    inter_bs_round(params, w, gs, snr, cfg, Algo::kDfedavg, 1);
    CHECK(params[0][0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(params[1][0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(params[2][0] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("inter-BS: dense consensus contracts at lambda2 and converges to the mean") {
    SimConfig cfg;
    Topology t = path3();
    MixingMatrix w = build_mixing_matrix(t);
    const double l2 = oracle::lambda2(w.w, 3);
    CHECK(l2 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

    RngStream rng = derive_rng(3, "fed", 0, "contraction");
    const int dim = 8;
    std::vector<ParamVector> params(3, ParamVector(dim));
    ParamVector mean(dim, 0.0);
    for (auto& p : params)
        for (int k = 0; k < dim; ++k) {
            p[k] = rng.uniform(-5.0, 5.0);
            mean[k] += p[k] / 3.0;
        }
    GossipState gs = GossipState::init(t, ParamVector(dim, 0.0));
    std::vector<ChannelDraw> snr(gs.edges.size(), ChannelDraw{10.0, 10.0});

    const double d0 = max_pairwise_distance(params);
    double bound = d0;
    for (int step = 1; step <= 60; ++step) {
        inter_bs_round(params, w, gs, snr, cfg, Algo::kDfedavg, static_cast<std::uint64_t>(step));
        bound *= l2;
        CHECK(max_pairwise_distance(params) <= bound + 1e-9);
    }
    for (const auto& p : params)
        for (int k = 0; k < dim; ++k) CHECK(std::fabs(p[k] - mean[k]) < 1e-8);
}

TEST_CASE("run_experiment: zero rounds yield an empty record list") {
    SimConfig cfg = fast_cfg();
    cfg.rounds = 0;
    RunResult res = run_experiment(cfg, Algo::kDsfl);
    CHECK(res.records.empty());
    CHECK(res.ledger.entries().empty());
}

TEST_CASE("run_experiment: ledger has exactly one entry per transmission") {
    SimConfig cfg = fast_cfg();
    RunResult res = run_experiment(cfg, Algo::kDsfl);
    // per round: one entry per MED plus one per directed BS edge (complete-3: 6)
    const std::size_t links = cfg.total_meds + 6;
    for (int r = 1; r <= cfg.rounds; ++r)
        CHECK(res.ledger.entries_in_round(static_cast<std::uint64_t>(r)) == links);
    // energy additivity: round totals recompose exactly in entry order
    double cum = 0.0;
    for (const auto& rec : res.records) {
        CHECK(rec.energy_round_j == res.ledger.round_total(static_cast<std::uint64_t>(rec.round)));
        cum += rec.energy_round_j;
        CHECK(rec.energy_cum_j == cum);
    }
}

TEST_CASE("run_experiment: dense baselines report cr_mean 0") {
    SimConfig cfg = fast_cfg();
    cfg.rounds = 1;
    CHECK(run_experiment(cfg, Algo::kDfedavg).records[0].cr_mean == 0.0);
    CHECK(run_experiment(cfg, Algo::kQdfedavg).records[0].cr_mean == 0.0);
}

TEST_CASE("run_experiment: serial and parallel paths agree bitwise") {
    SimConfig cfg = fast_cfg(42);
    RunResult a = run_experiment(cfg, Algo::kDsfl, ExecPolicy::kSerial);
    RunResult b = run_experiment(cfg, Algo::kDsfl, ExecPolicy::kParallel);
    CHECK(records_to_csv(a.records) == records_to_csv(b.records));
}

TEST_CASE("run_experiment: dsfl with keep=1 and no feedback degenerates to dfedavg") {
    SimConfig cfg = fast_cfg(7);
    cfg.cr_min = 0.0;
    cfg.cr_max = 0.0;
    cfg.error_feedback = false;
    RunResult sparse = run_experiment(cfg, Algo::kDsfl);
    RunResult dense = run_experiment(cfg, Algo::kDfedavg);
    REQUIRE(sparse.records.size() == dense.records.size());
    for (std::size_t i = 0; i < sparse.records.size(); ++i) {
        const auto& s = sparse.records[i];
        const auto& d = dense.records[i];
        CHECK(s.psnr_mean_1db == d.psnr_mean_1db);
        CHECK(s.psnr_mean_13db == d.psnr_mean_13db);
        CHECK(s.ms_ssim_mean_1db == d.ms_ssim_mean_1db);
        CHECK(s.ms_ssim_mean_13db == d.ms_ssim_mean_13db);
        CHECK(s.accuracy == d.accuracy);
        CHECK(s.snr_mean_db == d.snr_mean_db);
        // energy columns intentionally differ: sparse encoding pays index bits
        CHECK(s.energy_round_j > d.energy_round_j);
    }
}

TEST_CASE("algo names round-trip") {
    for (Algo a : {Algo::kDsfl, Algo::kDfedavg, Algo::kQdfedavg})
        CHECK(parse_algo(to_string(a)) == a);
    CHECK_THROWS(parse_algo("fedavg"));
}
