#include "bhsim/network.hpp"

#include <cstdio>

namespace bhsim {

namespace {

std::string fmt_time(SimTime t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    return buf;
}

}  // namespace

Network::Network(std::uint64_t seed, RandomWaypoint field, NetworkParams params,
                 const std::vector<AttackerConfig>& attackers)
    : params_(params),
      field_(std::move(field)),
      medium_(params.medium, engine_, field_, Rng(derive_seed(seed, Stream::Medium)),
              [this](NodeId to, NodeId from, const Message& msg) { on_receive(to, from, msg); }),
      behavior_rng_(derive_seed(seed, Stream::Behavior)) {
    params_.protocol.validate();
    if (!(params_.mobility_tick > 0.0)) throw ConfigError("mobility_tick must be > 0");
    if (!(params_.sample_interval > 0.0)) throw ConfigError("sample_interval must be > 0");

    std::map<NodeId, AttackerConfig> by_id;
    for (const AttackerConfig& a : attackers) {
        if (a.node >= field_.size()) {
            throw ConfigError("attacker id " + std::to_string(a.node) + " out of range");
        }
        by_id[a.node] = a;
        attacker_ids_.insert(a.node);
    }
    routers_.reserve(field_.size());
    for (NodeId id = 0; id < field_.size(); ++id) {
        if (auto it = by_id.find(id); it != by_id.end()) {
            routers_.push_back(std::make_unique<BlackholeRouter>(id, *this, params_.protocol,
                                                                 it->second, attacker_ids_));
        } else {
            routers_.push_back(std::make_unique<Router>(id, *this, params_.protocol));
        }
    }

    if (!field_.is_static()) {
        const double tick = params_.mobility_tick;
        std::shared_ptr<std::function<void()>> step = std::make_shared<std::function<void()>>();
        *step = [this, tick, weak = std::weak_ptr(step)] {
            field_.step_all(tick);
            if (auto self = weak.lock()) {
                engine_.schedule_in(tick, EventKind::MobilityTick, kNoNode, [self] { (*self)(); });
            }
        };
        engine_.schedule_in(tick, EventKind::MobilityTick, kNoNode, [step] { (*step)(); });
    }

    std::shared_ptr<std::function<void()>> sample = std::make_shared<std::function<void()>>();
    *sample = [this, weak = std::weak_ptr(sample)] {
        sample_poisoned();
        if (auto self = weak.lock()) {
            engine_.schedule_in(params_.sample_interval, EventKind::Timer, kNoNode,
                                [self] { (*self)(); });
        }
    };
    engine_.schedule_in(params_.sample_interval, EventKind::Timer, kNoNode,
                        [sample] { (*sample)(); });
}

Router& Network::node(NodeId id) {
    if (id >= routers_.size()) throw ConfigError("unknown node id " + std::to_string(id));
    return *routers_[id];
}

const Router& Network::node(NodeId id) const {
    if (id >= routers_.size()) throw ConfigError("unknown node id " + std::to_string(id));
    return *routers_[id];
}

void Network::trace(NodeId node, const char* kind, const std::string& detail) {
    if (trace_ == nullptr) return;
    *trace_ << "t=" << fmt_time(engine_.now()) << " node=";
    if (node == kNoNode) {
        *trace_ << '-';
    } else {
        *trace_ << node;
    }
    *trace_ << " kind=" << kind << " detail=" << detail << '\n';
}

void Network::add_flow(const FlowSpec& flow) {
    if (flow.source >= size() || flow.destination >= size() || flow.source == flow.destination) {
        throw ConfigError("flow " + std::to_string(flow.flow_id) + " has invalid endpoints");
    }
    if (!(flow.rate > 0.0)) throw ConfigError("flow rate must be > 0");
    const std::size_t index = flows_.size();
    flows_.push_back(flow);
    next_seq_.push_back(0);
    if (flow.start < flow.stop) {
        engine_.schedule(flow.start, EventKind::TrafficTick, flow.source,
                         [this, index] { send_packet(index); });
    }
}

void Network::send_packet(std::size_t flow_index) {
    const FlowSpec& flow = flows_[flow_index];
    DataPacket pkt;
    pkt.flow_id = flow.flow_id;
    pkt.seq = next_seq_[flow_index]++;
    pkt.origin = flow.source;
    pkt.destination = flow.destination;
    pkt.payload_size = flow.payload;
    pkt.ttl = params_.protocol.data_ttl;
    ledger_.record_sent(pkt.flow_id, pkt.seq);
    trace(flow.source, "SEND", summarize(pkt));

    const SimTime next = flow.start + static_cast<double>(next_seq_[flow_index]) / flow.rate;
    if (next < flow.stop) {
        engine_.schedule(next, EventKind::TrafficTick, flow.source,
                         [this, flow_index] { send_packet(flow_index); });
    }
    routers_[flow.source]->originate_data(std::move(pkt));
}

void Network::run_until(SimTime t_end) { engine_.run_until(t_end); }

void Network::on_receive(NodeId to, NodeId from, const Message& msg) {
    if (std::holds_alternative<DataPacket>(msg)) --in_transit_;
    trace(to, "RECV", "from=" + std::to_string(from) + " " + summarize(msg));
    routers_[to]->receive(msg, from);
}

void Network::count_control(const Message& msg) {
    ControlCounts& c = counters_.control;
    switch (type_of(msg)) {
        case MessageType::Rreq: ++c.rreq; break;
        case MessageType::Rrep: ++c.rrep; break;
        case MessageType::Rerr: ++c.rerr; break;
        case MessageType::Frq: ++c.frq; break;
        case MessageType::Frp: ++c.frp; break;
        case MessageType::Alarm: ++c.alarm; break;
        case MessageType::Data: break;
    }
}

void Network::broadcast(NodeId from, const Message& msg) {
    count_control(msg);
    const std::size_t n = medium_.broadcast(from, msg);
    trace(from, "BCAST", summarize(msg) + " receivers=" + std::to_string(n));
}

LinkStatus Network::unicast(NodeId from, NodeId to, const Message& msg) {
    const Transmission tx = medium_.unicast(from, to, msg);
    if (tx.status == LinkStatus::LinkBroken) {
        trace(from, "LINKBREAK", "to=" + std::to_string(to) + " " + summarize(msg));
        return tx.status;
    }
    count_control(msg);
    if (std::holds_alternative<DataPacket>(msg)) {
        if (tx.scheduled) {
            ++in_transit_;
        } else {
            ++counters_.link_lost;
        }
    }
    trace(from, tx.scheduled ? "UNICAST" : "LOST", "to=" + std::to_string(to) + " " + summarize(msg));
    return tx.status;
}

EventId Network::set_timer(NodeId node, double delay, std::string_view what,
                           std::function<void()> fn) {
    return engine_.schedule_in(delay, EventKind::Timer, node,
                               [this, node, what = std::string(what), fn = std::move(fn)] {
                                   trace(node, "TIMER", what);
                                   fn();
                               });
}

void Network::cancel_timer(EventId id) {
    if (id != 0) engine_.cancel(id);
}

void Network::data_delivered(NodeId at, const DataPacket& pkt) {
    if (ledger_.record_delivered(pkt.flow_id, pkt.seq)) {
        trace(at, "DELIVERED", summarize(pkt));
        if (delivery_hook_) delivery_hook_(pkt);
    }
}

void Network::data_dropped(NodeId at, const DataPacket& pkt, DropReason why) {
    switch (why) {
        case DropReason::Attacker: ++counters_.attacker_dropped; break;
        case DropReason::Overflow: ++counters_.overflow_dropped; break;
        case DropReason::NoRoute: ++counters_.no_route_dropped; break;
        case DropReason::Ttl: ++counters_.ttl_dropped; break;
    }
    trace(at, "DROP", std::string(to_string(why)) + " " + summarize(pkt));
}

void Network::rrep_forged(NodeId attacker, const Rrep& rrep) {
    ++counters_.false_rreps_traced;
    trace(attacker, "FORGE", summarize(rrep));
}

void Network::session_closed(const SessionRecord& record) {
    switch (record.verdict) {
        case Verdict::SecureRoute: ++counters_.secure_verdicts; break;
        case Verdict::BlackholesFound:
            ++counters_.blackhole_verdicts;
            if (!counters_.detection_time) counters_.detection_time = record.time;
            break;
        case Verdict::InsecureUnverifiable: ++counters_.unverifiable_verdicts; break;
        case Verdict::Continue: break;
    }
    trace(record.origin, "VERDICT", format_record(record));
    audit_.push_back(record);
}

void Network::sample_poisoned() {
    std::vector<const RoutingTable*> tables;
    tables.reserve(routers_.size());
    for (const auto& r : routers_) {
        if (!r->is_attacker()) tables.push_back(&r->routes());
    }
    const std::uint64_t n = count_poisoned_nodes(tables, attacker_ids_, engine_.now());
    if (n > counters_.poisoned_nodes) counters_.poisoned_nodes = n;
}

RunMetrics Network::metrics() {
    sample_poisoned();
    RunMetrics m = counters_;
    m.sent = ledger_.sent();
    m.delivered = ledger_.delivered();
    m.pdr = ledger_.pdr();
    m.false_rreps = 0;
    m.blacklisted.clear();
    std::uint64_t buffered = 0;
    for (const auto& r : routers_) {
        buffered += r->buffered();
        if (r->is_attacker()) {
            m.false_rreps += static_cast<const BlackholeRouter&>(*r).count_false_rrep();
        } else {
            for (NodeId b : r->blacklist().ids()) m.blacklisted.insert(b);
        }
    }
    m.in_flight = in_transit_ + buffered;
    return m;
}

std::string Network::dump_routes(NodeId id) const { return node(id).routes().dump(); }

std::string Network::dump_dri(NodeId id) const { return node(id).dri().dump(); }

}  // namespace bhsim
