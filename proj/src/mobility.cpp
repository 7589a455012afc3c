#include "bhsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bhsim {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

void MobilityParams::validate() const {
    if (!(v_min > 0.0)) throw ConfigError("v_min must be > 0");
    if (v_max < v_min) throw ConfigError("v_max must be >= v_min");
    if (pause < 0.0) throw ConfigError("pause must be >= 0");
}

RandomWaypoint::RandomWaypoint(std::size_t node_count, Area area, MobilityParams params, Rng rng)
    : area_(area), params_(params), rng_(rng), states_(node_count) {
    params_.validate();
    for (auto& s : states_) {
        s.current = draw_point();
        draw_leg(s);
    }
}

RandomWaypoint::RandomWaypoint(Area area, std::vector<MobilityState> states)
    : area_(area), states_(std::move(states)), static_(true) {}

RandomWaypoint RandomWaypoint::fixed(std::span<const Position> positions, Area area) {
    std::vector<MobilityState> states;
    states.reserve(positions.size());
    for (const Position& p : positions) {
        if (!area.contains(p)) throw ConfigError("static position outside the area");
        states.push_back(MobilityState{p, p, 0.0, 0.0});
    }
    return RandomWaypoint(area, std::move(states));
}

const MobilityState& RandomWaypoint::state(NodeId node) const {
    if (node >= states_.size()) throw ConfigError("unknown node id " + std::to_string(node));
    return states_[node];
}

MobilityState& RandomWaypoint::state(NodeId node) {
    if (node >= states_.size()) throw ConfigError("unknown node id " + std::to_string(node));
    return states_[node];
}

Position RandomWaypoint::draw_point() {
    const double x = rng_.uniform(0.0, area_.width);
    const double y = rng_.uniform(0.0, area_.height);
    return {x, y};
}

void RandomWaypoint::draw_leg(MobilityState& s) {
    s.waypoint = draw_point();
    s.speed = params_.v_min == params_.v_max ? params_.v_min
                                             : rng_.uniform(params_.v_min, params_.v_max);
}

void RandomWaypoint::step(NodeId node, double dt) {
    if (!(dt > 0.0)) throw ConfigError("mobility step requires dt > 0");
    MobilityState& s = state(node);
    if (static_) return;
    double left = dt;
    while (left > 0.0) {
        if (s.pause_remaining > 0.0) {
            const double used = std::min(left, s.pause_remaining);
            s.pause_remaining -= used;
            left -= used;
            if (s.pause_remaining > 0.0) return;
            draw_leg(s);
            continue;
        }
        const double dx = s.waypoint.x - s.current.x;
        const double dy = s.waypoint.y - s.current.y;
        const double remaining = std::hypot(dx, dy);
        const double travel = s.speed * left;
        if (travel < remaining) {
            const double f = travel / remaining;
            s.current.x += dx * f;
            s.current.y += dy * f;
            return;
        }
        // Arrival: snap to the waypoint and spend any leftover time pausing.
        s.current = s.waypoint;
        left -= remaining / s.speed;
        s.pause_remaining = params_.pause;
        if (s.pause_remaining <= 0.0) draw_leg(s);
    }
}

void RandomWaypoint::step_all(double dt) {
    for (NodeId n = 0; n < states_.size(); ++n) step(n, dt);
}

}  // namespace bhsim
