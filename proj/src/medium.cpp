#include "bhsim/medium.hpp"

#include <string>

namespace bhsim {

void MediumParams::validate() const {
    if (!(range > 0.0)) throw ConfigError("range must be > 0");
    if (per_hop_delay < 0.0) throw ConfigError("per_hop_delay must be >= 0");
    if (broadcast_jitter_max < 0.0) throw ConfigError("broadcast_jitter_max must be >= 0");
    if (!(loss_probability >= 0.0 && loss_probability <= 1.0)) {
        throw ConfigError("loss_probability must lie in [0, 1]");
    }
}

Medium::Medium(MediumParams params, Engine& engine, const RandomWaypoint& field, Rng rng,
               Receiver receiver)
    : params_(params), engine_(engine), field_(field), rng_(rng), receiver_(std::move(receiver)) {
    params_.validate();
}

bool Medium::in_range(NodeId a, NodeId b) const {
    const Position pa = field_.position(a);
    const Position pb = field_.position(b);
    const double dx = pa.x - pb.x;
    const double dy = pa.y - pb.y;
    return dx * dx + dy * dy <= params_.range * params_.range;
}

std::vector<NodeId> Medium::neighbors(NodeId node) const {
    if (node >= field_.size()) throw ConfigError("unknown node id " + std::to_string(node));
    std::vector<NodeId> out;
    for (NodeId other = 0; other < field_.size(); ++other) {
        if (other != node && in_range(node, other)) out.push_back(other);
    }
    return out;
}

void Medium::deliver_at(SimTime when, NodeId to, NodeId from, const Message& msg) {
    engine_.schedule(when, EventKind::Deliver, to,
                     [this, to, from, msg] { receiver_(to, from, msg); });
}

std::size_t Medium::broadcast(NodeId sender, const Message& msg) {
    std::size_t scheduled = 0;
    for (NodeId n : neighbors(sender)) {
        if (rng_.bernoulli(params_.loss_probability)) continue;
        const double jitter =
            params_.broadcast_jitter_max > 0.0 ? rng_.uniform(0.0, params_.broadcast_jitter_max) : 0.0;
        deliver_at(engine_.now() + params_.per_hop_delay + jitter, n, sender, msg);
        ++scheduled;
    }
    return scheduled;
}

Transmission Medium::unicast(NodeId sender, NodeId receiver, const Message& msg) {
    if (receiver >= field_.size() || sender >= field_.size()) {
        throw ConfigError("unicast with unknown node id");
    }
    if (sender == receiver || !in_range(sender, receiver)) return {LinkStatus::LinkBroken, false};
    if (rng_.bernoulli(params_.loss_probability)) return {LinkStatus::Delivered, false};
    deliver_at(engine_.now() + params_.per_hop_delay, receiver, sender, msg);
    return {LinkStatus::Delivered, true};
}

}  // namespace bhsim
