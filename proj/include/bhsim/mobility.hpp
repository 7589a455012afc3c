#pragma once

#include <span>
#include <vector>

#include "bhsim/rng.hpp"
#include "bhsim/types.hpp"

namespace bhsim {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double distance(Position a, Position b);

struct Area {
    double width = 1000.0;
    double height = 1000.0;

    bool contains(Position p) const {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
    }
};

struct MobilityParams {
    double v_min = 5.0;   // m/s, strictly positive
    double v_max = 20.0;  // m/s
    double pause = 10.0;  // s, applied on waypoint arrival

    void validate() const;
};

struct MobilityState {
    Position current;
    Position waypoint;
    double speed = 0.0;
    double pause_remaining = 0.0;
};

/// Random waypoint mobility with a strictly positive minimum speed.
///
/// Nodes start at uniformly drawn positions and head for a uniformly drawn
/// waypoint; on arrival they pause, then draw a new waypoint and speed.
/// A static field (every node fixed in place) is built with `fixed`.
class RandomWaypoint {
public:
    RandomWaypoint(std::size_t node_count, Area area, MobilityParams params, Rng rng);

    static RandomWaypoint fixed(std::span<const Position> positions, Area area);

    /// Advances one node by dt seconds (dt > 0).
    void step(NodeId node, double dt);
    void step_all(double dt);

    Position position(NodeId node) const { return state(node).current; }
    const MobilityState& state(NodeId node) const;
    MobilityState& state(NodeId node);
    std::size_t size() const { return states_.size(); }
    bool is_static() const { return static_; }
    const Area& area() const { return area_; }

private:
    RandomWaypoint(Area area, std::vector<MobilityState> states);

    Position draw_point();
    void draw_leg(MobilityState& s);

    Area area_;
    MobilityParams params_;
    Rng rng_;
    std::vector<MobilityState> states_;
    bool static_ = false;
};

}  // namespace bhsim
