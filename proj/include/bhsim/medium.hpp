#pragma once

#include <functional>
#include <vector>

#include "bhsim/engine.hpp"
#include "bhsim/messages.hpp"
#include "bhsim/mobility.hpp"
#include "bhsim/rng.hpp"

namespace bhsim {

struct MediumParams {
    double range = 200.0;                 // m
    double per_hop_delay = 0.002;         // s
    double broadcast_jitter_max = 0.010;  // s
    double loss_probability = 0.0;

    void validate() const;
};

enum class LinkStatus { Delivered, LinkBroken };

struct Transmission {
    LinkStatus status = LinkStatus::LinkBroken;
    /// False when the frame was dropped by the loss model; the sender cannot tell.
    bool scheduled = false;
};

/// Unit-disk wireless medium.
///
/// Two nodes hear each other iff their Euclidean distance is <= range.
/// Each delivery is dropped independently with loss_probability.
class Medium {
public:
    using Receiver = std::function<void(NodeId to, NodeId from, const Message& msg)>;

    Medium(MediumParams params, Engine& engine, const RandomWaypoint& field, Rng rng,
           Receiver receiver);

    /// Nodes within range of `node`, excluding itself, in id order.
    std::vector<NodeId> neighbors(NodeId node) const;
    bool in_range(NodeId a, NodeId b) const;

    /// Schedules one delivery per neighbor at now + delay + U(0, jitter).
    /// Returns the number of deliveries scheduled.
    std::size_t broadcast(NodeId sender, const Message& msg);

    /// LinkBroken iff the receiver is out of range right now.
    Transmission unicast(NodeId sender, NodeId receiver, const Message& msg);

    const MediumParams& params() const { return params_; }

private:
    void deliver_at(SimTime when, NodeId to, NodeId from, const Message& msg);

    MediumParams params_;
    Engine& engine_;
    const RandomWaypoint& field_;
    Rng rng_;
    Receiver receiver_;
};

}  // namespace bhsim
