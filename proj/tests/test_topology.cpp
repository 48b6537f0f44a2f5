#include <doctest.h>

#include <algorithm>

#include "dsfl/topology.hpp"

using namespace dsfl;

TEST_CASE("edge construction per kind") {
    auto path = make_bs_edges(3, TopologyKind::kPath);
    CHECK(path == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});

    auto ring = make_bs_edges(4, TopologyKind::kRing);
    CHECK(ring == std::vector<std::pair<int, int>>{{0, 1}, {0, 3}, {1, 2}, {2, 3}});

    // ring of 3 == complete of 3, and a 2-node ring has a single edge
    CHECK(make_bs_edges(3, TopologyKind::kRing) == make_bs_edges(3, TopologyKind::kComplete));
    CHECK(make_bs_edges(2, TopologyKind::kRing) == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("connectivity check") {
    CHECK(is_connected(3, {{0, 1}, {1, 2}}));
    CHECK(!is_connected(3, {{0, 1}}));
    CHECK(is_connected(1, {}));
}

TEST_CASE("assignment is balanced, bounded and seeded") {
    SimConfig cfg;  // 20 MEDs over 3 BSs
    RngStream a = derive_rng(cfg.seed, "topology", 0, "assign");
    Topology t = build_topology(cfg, a);
    REQUIRE(static_cast<int>(t.med_assignment.size()) == cfg.total_meds);

    std::vector<int> counts(cfg.n_bs, 0);
    for (int bs : t.med_assignment) {
        REQUIRE(bs >= 0);
        REQUIRE(bs < cfg.n_bs);
        counts[bs]++;
    }
    for (int c : counts) {
        CHECK(c >= 1);
        CHECK(c <= 10);
    }

    RngStream b = derive_rng(cfg.seed, "topology", 0, "assign");
    Topology t2 = build_topology(cfg, b);
    CHECK(t.med_assignment == t2.med_assignment);

    CHECK_THROWS([&] {
        SimConfig tight = cfg;
        tight.total_meds = 31;  // over the 10-per-BS cap
        RngStream r = derive_rng(0, "topology", 0, "assign");
        build_topology(tight, r);
    }());
}
