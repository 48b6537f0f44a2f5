#include "dsfl/topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsfl {

std::vector<int> Topology::meds_of(int bs) const {
    std::vector<int> out;
    for (int m = 0; m < static_cast<int>(med_assignment.size()); ++m)
        if (med_assignment[m] == bs) out.push_back(m);
    return out;
}

std::vector<int> Topology::neighbors_of(int bs) const {
    std::vector<int> out;
    for (const auto& [a, b] : bs_edges) {
        if (a == bs) out.push_back(b);
        if (b == bs) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int Topology::degree_of(int bs) const {
    int d = 0;
    for (const auto& [a, b] : bs_edges)
        if (a == bs || b == bs) ++d;
    return d;
}

bool is_connected(int n_bs, const std::vector<std::pair<int, int>>& edges) {
    if (n_bs <= 0) return false;
    std::vector<std::vector<int>> adj(n_bs);
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<char> seen(n_bs, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n_bs;
}

std::vector<std::pair<int, int>> make_bs_edges(int n_bs, TopologyKind kind) {
    std::vector<std::pair<int, int>> edges;
    auto add = [&edges](int a, int b) {
        if (a == b) return;
        if (a > b) std::swap(a, b);
        if (std::find(edges.begin(), edges.end(), std::make_pair(a, b)) == edges.end())
            edges.emplace_back(a, b);
    };
    switch (kind) {
        case TopologyKind::kRing:
            for (int i = 0; i < n_bs; ++i) add(i, (i + 1) % n_bs);
            break;
        case TopologyKind::kPath:
            for (int i = 0; i + 1 < n_bs; ++i) add(i, i + 1);
            break;
        case TopologyKind::kComplete:
            for (int i = 0; i < n_bs; ++i)
                for (int j = i + 1; j < n_bs; ++j) add(i, j);
            break;
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

Topology build_topology(const SimConfig& cfg, RngStream& rng,
                        int min_per_bs, int max_per_bs) {
    if (cfg.total_meds < cfg.n_bs * min_per_bs ||
        cfg.total_meds > cfg.n_bs * max_per_bs)
        throw std::invalid_argument("total_meds incompatible with per-BS bounds");

    Topology t;
    t.n_bs = cfg.n_bs;
    t.bs_edges = make_bs_edges(cfg.n_bs, cfg.topology_kind);
    if (!is_connected(t.n_bs, t.bs_edges))
        throw std::invalid_argument("BS graph must be connected");

    // Round-robin keeps counts within one of each other, then the shuffle
    // randomizes which MED lands where without changing the counts.
    t.med_assignment.resize(cfg.total_meds);
    for (int m = 0; m < cfg.total_meds; ++m) t.med_assignment[m] = m % cfg.n_bs;
    rng.shuffle(t.med_assignment);
    return t;
}

}  // namespace dsfl
