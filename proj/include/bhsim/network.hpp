#pragma once

#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "bhsim/adversary.hpp"
#include "bhsim/engine.hpp"
#include "bhsim/medium.hpp"
#include "bhsim/mobility.hpp"
#include "bhsim/router.hpp"
#include "bhsim/traffic.hpp"

namespace bhsim {

struct NetworkParams {
    MediumParams medium;
    ProtocolParams protocol;
    double mobility_tick = 0.1;      // s
    double sample_interval = 100.0;  // s between poisoned-node samples
};

/// One simulation run: the engine, the field, the medium and every node.
class Network final : public Host {
public:
    Network(std::uint64_t seed, RandomWaypoint field, NetworkParams params,
            const std::vector<AttackerConfig>& attackers = {});

    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    /// Event trace sink, one line per event. nullptr disables tracing.
    void set_trace(std::ostream* out) { trace_ = out; }

    /// Called once per first-time delivery, with the packet's hop trace.
    void on_delivery(std::function<void(const DataPacket&)> fn) { delivery_hook_ = std::move(fn); }

    /// Schedules a CBR flow. Throws ConfigError on bad endpoints.
    void add_flow(const FlowSpec& flow);

    void run_until(SimTime t_end);

    /// Metrics as of now; takes a final poisoned-node sample.
    RunMetrics metrics();

    std::size_t size() const { return routers_.size(); }
    Router& node(NodeId id);
    const Router& node(NodeId id) const;
    const std::set<NodeId>& attackers() const { return attacker_ids_; }

    Engine& engine() { return engine_; }
    RandomWaypoint& field() { return field_; }
    Medium& medium() { return medium_; }
    const TrafficLedger& ledger() const { return ledger_; }
    const std::vector<SessionRecord>& audit() const { return audit_; }

    std::string dump_routes(NodeId id) const;
    std::string dump_dri(NodeId id) const;

    // Host
    SimTime now() const override { return engine_.now(); }
    void broadcast(NodeId from, const Message& msg) override;
    LinkStatus unicast(NodeId from, NodeId to, const Message& msg) override;
    EventId set_timer(NodeId node, double delay, std::string_view what,
                      std::function<void()> fn) override;
    void cancel_timer(EventId id) override;
    std::vector<NodeId> neighbors(NodeId node) const override { return medium_.neighbors(node); }
    Rng& behavior_rng() override { return behavior_rng_; }
    void data_delivered(NodeId at, const DataPacket& pkt) override;
    void data_dropped(NodeId at, const DataPacket& pkt, DropReason why) override;
    void rrep_forged(NodeId attacker, const Rrep& rrep) override;
    void session_closed(const SessionRecord& record) override;

private:
    void on_receive(NodeId to, NodeId from, const Message& msg);
    void send_packet(std::size_t flow_index);
    void sample_poisoned();
    void count_control(const Message& msg);
    void trace(NodeId node, const char* kind, const std::string& detail);

    NetworkParams params_;
    Engine engine_;
    RandomWaypoint field_;
    Medium medium_;
    Rng behavior_rng_;
    std::vector<std::unique_ptr<Router>> routers_;
    std::set<NodeId> attacker_ids_;

    std::vector<FlowSpec> flows_;
    std::vector<std::uint32_t> next_seq_;
    TrafficLedger ledger_;
    RunMetrics counters_;
    std::uint64_t in_transit_ = 0;
    std::vector<SessionRecord> audit_;
    std::ostream* trace_ = nullptr;
    std::function<void(const DataPacket&)> delivery_hook_;
};

}  // namespace bhsim
