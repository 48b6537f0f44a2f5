#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "dsfl/data.hpp"
#include "dsfl/metrics.hpp"

using namespace dsfl;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    fs::path p = fs::temp_directory_path() / (std::string("dsfl_test_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("synthetic generator: balance, range, separability, determinism") {
    RngStream rng = derive_rng(0, "data", 0, "synthetic");
    Dataset d = gen_synthetic(100, 16, rng);
    REQUIRE(d.examples.size() == 100);
    CHECK(d.class_counts == std::vector<std::int64_t>{50, 50});

    for (const auto& ex : d.examples) {
        double mx = 0.0;
        for (double p : ex.image.px) {
            REQUIRE(p >= 0.0);
            REQUIRE(p <= 1.0);
            mx = std::max(mx, p);
        }
        if (ex.label == 1)
            CHECK(mx >= 0.5);
        else
            CHECK(mx <= 0.3);  // smoothing cannot raise the background cap
    }

    RngStream rng2 = derive_rng(0, "data", 0, "synthetic");
    Dataset d2 = gen_synthetic(100, 16, rng2);
    for (std::size_t i = 0; i < d.examples.size(); ++i) {
        CHECK(d.examples[i].label == d2.examples[i].label);
        CHECK(d.examples[i].image.px == d2.examples[i].image.px);
    }

    CHECK_THROWS(gen_synthetic(3, 16, rng));
    CHECK_THROWS(gen_synthetic(10, 4, rng));
}

TEST_CASE("synthetic classes separable at size 8 as well") {
    RngStream rng = derive_rng(5, "data", 0, "synthetic");
    Dataset d = gen_synthetic(60, 8, rng);
    for (const auto& ex : d.examples) {
        double mx = *std::max_element(ex.image.px.begin(), ex.image.px.end());
        if (ex.label == 1)
            CHECK(mx >= 0.5);
        else
            CHECK(mx < 0.5);
    }
}

TEST_CASE("dirichlet partition: disjoint, exhaustive, nonempty") {
    RngStream rng = derive_rng(1, "data", 0, "partition");
    std::vector<int> labels(97);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2;

    Partition p = partition_dirichlet(labels, 20, 0.3, rng);
    REQUIRE(p.shards.size() == 20);
    std::set<int> seen;
    std::size_t total = 0;
    for (const auto& shard : p.shards) {
        CHECK(!shard.empty());
        total += shard.size();
        for (int idx : shard) {
            REQUIRE(idx >= 0);
            REQUIRE(idx < static_cast<int>(labels.size()));
            CHECK(seen.insert(idx).second);  // disjoint
        }
    }
    CHECK(total == labels.size());

    Partition single = partition_dirichlet(labels, 1, 0.3, rng);
    CHECK(single.shards[0].size() == labels.size());
}

TEST_CASE("dirichlet alpha controls skew") {
    std::vector<int> labels(400);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2;
    std::vector<int> everything(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) everything[i] = static_cast<int>(i);
    auto global = label_distribution(labels, everything);

    double mean_tv_concentrated = 0.0, mean_tv_skewed = 0.0;
    int n_shards = 0, n_shards_skewed = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RngStream r1 = derive_rng(seed, "data", 0, "partition-conc");
        Partition conc = partition_dirichlet(labels, 20, 1e6, r1);
        for (const auto& shard : conc.shards) {
            double tv = tv_distance(label_distribution(labels, shard), global);
            CHECK(tv <= 0.1);  // near-IID at huge alpha
            mean_tv_concentrated += tv;
            ++n_shards;
        }
        RngStream r2 = derive_rng(seed, "data", 0, "partition-skew");
        Partition skew = partition_dirichlet(labels, 20, 0.1, r2);
        for (const auto& shard : skew.shards) {
            mean_tv_skewed += tv_distance(label_distribution(labels, shard), global);
            ++n_shards_skewed;
        }
    }
    CHECK(mean_tv_skewed / n_shards_skewed > mean_tv_concentrated / n_shards);
}

TEST_CASE("BS mixture is the count-weighted mean of MED distributions") {
    RngStream rng = derive_rng(3, "data", 0, "partition");
    std::vector<int> labels(120);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2;
    Partition p = partition_dirichlet(labels, 6, 0.3, rng);

    // treat shards 0..2 as one BS
    std::vector<int> bs_members;
    double weighted0 = 0.0;
    std::size_t bs_total = 0;
    for (int m = 0; m < 3; ++m) bs_total += p.shards[m].size();
    for (int m = 0; m < 3; ++m) {
        auto dist = label_distribution(labels, p.shards[m]);
        weighted0 += dist[0] * (static_cast<double>(p.shards[m].size()) / bs_total);
        bs_members.insert(bs_members.end(), p.shards[m].begin(), p.shards[m].end());
    }
    auto bs_dist = label_distribution(labels, bs_members);
    CHECK(bs_dist[0] == doctest::Approx(weighted0).epsilon(1e-12));
}

TEST_CASE("pgm round-trip is exact on grid-valued pixels") {
    auto dir = temp_dir("pgm_rt");
    Image img;
    img.side = 16;
    img.px.resize(256);
    RngStream rng = derive_rng(7, "data", 0, "pgm");
    for (auto& p : img.px) p = static_cast<double>(rng.next_below(256)) / 255.0;

    auto path = (dir / "rt.pgm").string();
    save_pgm(img, path);
    Image back = load_pgm(path, 16);
    REQUIRE(back.side == 16);
    CHECK(back.px == img.px);
}

TEST_CASE("pgm parse errors are specific") {
    auto dir = temp_dir("pgm_err");

    auto write = [&dir](const char* name, const std::string& bytes) {
        std::ofstream f(dir / name, std::ios::binary);
        f << bytes;
        return (dir / name).string();
    };

    auto ascii = write("ascii.pgm", "P2\n4 4\n255\n0 0 0 0\n");
    CHECK_THROWS_WITH_AS(load_pgm(ascii, 4), doctest::Contains("unsupported magic P2"),
                         std::runtime_error);

    auto trunc = write("trunc.pgm", std::string("P5\n8 8\n255\n") + std::string(10, '\0'));
    CHECK_THROWS_WITH_AS(load_pgm(trunc, 8), doctest::Contains("truncated payload"),
                         std::runtime_error);

    auto badmax = write("badmax.pgm", std::string("P5\n4 4\n65535\n") + std::string(32, '\0'));
    CHECK_THROWS_WITH_AS(load_pgm(badmax, 4), doctest::Contains("unsupported maxval 65535"),
                         std::runtime_error);
}

TEST_CASE("pgm load pools a large checkerboard to flat half-gray") {
    auto dir = temp_dir("pgm_pool");
    // 1056 x 1024, alternating 0/255: every pooled block averages 127.5.
    const int w = 1056, h = 1024;
    std::string raster(static_cast<std::size_t>(w) * h, '\0');
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            raster[static_cast<std::size_t>(r) * w + c] = ((r + c) % 2) ? '\xff' : '\0';
    std::ofstream f(dir / "board.pgm", std::ios::binary);
    f << "P5\n" << w << " " << h << "\n255\n" << raster;
    f.close();

    Image img = load_pgm((dir / "board.pgm").string(), 16);
    REQUIRE(img.side == 16);
    for (double p : img.px) CHECK(p == doctest::Approx(127.5 / 255.0).epsilon(1e-12));
}

TEST_CASE("pgm comments in the header are skipped") {
    auto dir = temp_dir("pgm_comment");
    std::ofstream f(dir / "c.pgm", std::ios::binary);
    f << "P5\n# a comment line\n8 8\n255\n" << std::string(64, '\x40');
    f.close();
    Image img = load_pgm((dir / "c.pgm").string(), 8);
    CHECK(img.px[0] == doctest::Approx(64.0 / 255.0).epsilon(1e-12));
}
