#pragma once

#include <utility>
#include <vector>

#include "dsfl/config.hpp"
#include "dsfl/rng.hpp"

namespace dsfl {

// BS adjacency graph plus the MED -> BS assignment.
struct Topology {
    int n_bs = 0;
    std::vector<std::pair<int, int>> bs_edges;  // undirected, stored with first < second
    std::vector<int> med_assignment;            // med id -> bs id

    std::vector<int> meds_of(int bs) const;
    std::vector<int> neighbors_of(int bs) const;
    int degree_of(int bs) const;
};

bool is_connected(int n_bs, const std::vector<std::pair<int, int>>& edges);

// Edges for the configured graph kind (ring/path/complete).
std::vector<std::pair<int, int>> make_bs_edges(int n_bs, TopologyKind kind);

// Round-robin MED counts, shuffled by the seeded stream. Every BS ends up
// with between min_per_bs and max_per_bs MEDs.
Topology build_topology(const SimConfig& cfg, RngStream& rng,
                        int min_per_bs = 1, int max_per_bs = 10);

}  // namespace dsfl
