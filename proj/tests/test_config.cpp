#include <doctest.h>

#include <stdexcept>

#include "dsfl/config.hpp"
#include "dsfl/rng.hpp"

using namespace dsfl;

TEST_CASE("defaults validate clean") {
    SimConfig cfg;
    CHECK(validate_config(cfg).empty());
}

TEST_CASE("violations are named") {
    SimConfig cfg;
    cfg.snr_min_db = 20.0;
    cfg.snr_max_db = 0.1;
    auto bad = validate_config(cfg);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0] == "snr_min_db < snr_max_db");

    SimConfig cfg2;
    cfg2.cr_max = 1.0;
    bad = validate_config(cfg2);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0] == "cr_max < 1");

    SimConfig cfg3;
    cfg3.total_meds = 2;  // below n_bs
    bad = validate_config(cfg3);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0] == "total_meds >= n_bs");
}

TEST_CASE("serialize/parse round-trip is exact") {
    SimConfig cfg;
    CHECK(parse_config(serialize_config(cfg)) == cfg);

    // Randomized configs, including awkward decimals.
    RngStream rng = derive_rng(11, "config", 0, "roundtrip");
    for (int i = 0; i < 100; ++i) {
        SimConfig c;
        c.seed = rng.next_u64();
        c.n_bs = 1 + static_cast<int>(rng.next_below(5));
        c.total_meds = c.n_bs * (1 + static_cast<int>(rng.next_below(10)));
        c.snr_min_db = rng.uniform(-5.0, 5.0);
        c.snr_max_db = c.snr_min_db + rng.uniform(0.1, 30.0);
        c.power_w = rng.uniform(0.01, 2.0);
        c.bandwidth_hz = rng.uniform(1e4, 1e8);
        c.cr_min = rng.uniform(0.0, 0.5);
        c.cr_max = rng.uniform(c.cr_min + 1e-6, 0.999);
        c.quant_bits = 1 + static_cast<int>(rng.next_below(32));
        c.local_iters = 1 + static_cast<int>(rng.next_below(9));
        c.rounds = static_cast<int>(rng.next_below(300));
        c.lr = rng.uniform(0.0, 1.0);
        c.latent_dim = 1 + static_cast<int>(rng.next_below(64));
        c.image_size = 8 + static_cast<int>(rng.next_below(24));
        c.lambda_cls = rng.uniform(0.0, 2.0);
        c.dirichlet_alpha = rng.uniform(0.01, 10.0);
        c.error_feedback = rng.next_below(2) == 1;
        c.topology_kind = static_cast<TopologyKind>(rng.next_below(3));
        CHECK(parse_config(serialize_config(c)) == c);
    }
}

TEST_CASE("comments, blank lines and whitespace are tolerated") {
    SimConfig cfg = parse_config(
        "# a comment\n"
        "\n"
        "  seed = 42   # trailing comment\n"
        "rounds=3\n");
    CHECK(cfg.seed == 42);
    CHECK(cfg.rounds == 3);
}

TEST_CASE("unknown and duplicate keys are errors") {
    CHECK_THROWS_WITH_AS(parse_config("bogus_key = 1\n"),
                         doctest::Contains("unknown key 'bogus_key'"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("seed = 1\nseed = 2\n"),
                         doctest::Contains("duplicate key"), std::invalid_argument);
    CHECK_THROWS(parse_config("seed\n"));
    CHECK_THROWS(parse_config("rounds = notanumber\n"));
}
