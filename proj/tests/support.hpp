#pragma once

#include <memory>
#include <queue>
#include <sstream>
#include <vector>

#include "bhsim/network.hpp"

namespace bhsim::testing {

inline NetworkParams quiet_params(bool defense = false) {
    NetworkParams p;
    p.protocol.defense = defense;
    return p;
}

inline std::unique_ptr<Network> static_network(const std::vector<Position>& pos,
                                               NetworkParams params = quiet_params(),
                                               const std::vector<AttackerConfig>& attackers = {},
                                               std::uint64_t seed = 1) {
    return std::make_unique<Network>(seed, RandomWaypoint::fixed(pos, Area{}), params, attackers);
}

/// Evenly spaced nodes on a horizontal line.
inline std::vector<Position> line(std::size_t n, double spacing) {
    std::vector<Position> pos;
    for (std::size_t i = 0; i < n; ++i) pos.push_back({50.0 + spacing * double(i), 500.0});
    return pos;
}

/// Hop distances from `src` in the unit-disk graph; -1 if unreachable.
inline std::vector<int> bfs_hops(const std::vector<Position>& pos, NodeId src, double range) {
    std::vector<int> dist(pos.size(), -1);
    std::queue<NodeId> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        for (NodeId v = 0; v < pos.size(); ++v) {
            const double dx = pos[u].x - pos[v].x;
            const double dy = pos[u].y - pos[v].y;
            if (dist[v] < 0 && dx * dx + dy * dy <= range * range) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
        }
    }
    return dist;
}

/// Random connected placement of n nodes in a square of the given side.
inline std::vector<Position> random_connected(std::size_t n, double side, double range, Rng& rng) {
    for (;;) {
        std::vector<Position> pos;
        for (std::size_t i = 0; i < n; ++i) pos.push_back({rng.uniform(0, side), rng.uniform(0, side)});
        const auto d = bfs_hops(pos, 0, range);
        bool connected = true;
        for (int h : d) connected = connected && h >= 0;
        if (connected) return pos;
    }
}

inline FlowSpec flow(std::uint32_t id, NodeId src, NodeId dst, SimTime start, SimTime stop,
                     double rate = 2.0) {
    FlowSpec f;
    f.flow_id = id;
    f.source = src;
    f.destination = dst;
    f.rate = rate;
    f.start = start;
    f.stop = stop;
    return f;
}

// Reference layout of the cooperative black hole example.
// Links: S-2, S-B1, 2-4, B1-B2, 4-B2, 4-6, B2-6, 6-D.
namespace golden {
inline constexpr NodeId S = 0, N2 = 1, N4 = 2, N6 = 3, B1 = 4, B2 = 5, D = 6;
inline std::vector<Position> positions() {
    return {{100, 400}, {260, 300}, {420, 300}, {580, 360}, {250, 510}, {430, 480}, {740, 400}};
}
inline std::vector<AttackerConfig> attackers() {
    AttackerConfig b1;
    b1.node = B1;
    b1.role = AttackerRole::Primary;
    b1.partner = B2;
    AttackerConfig b2;
    b2.node = B2;
    b2.role = AttackerRole::Colluder;
    b2.partner = B1;
    return {b1, b2};
}
}  // namespace golden

}  // namespace bhsim::testing
