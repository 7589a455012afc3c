#pragma once

#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bhsim/cross_check.hpp"
#include "bhsim/dri_table.hpp"
#include "bhsim/engine.hpp"
#include "bhsim/medium.hpp"
#include "bhsim/messages.hpp"
#include "bhsim/rng.hpp"
#include "bhsim/routing_table.hpp"

namespace bhsim {

/// Protocol timers and switches. The timer values are artifact defaults.
struct ProtocolParams {
    bool defense = false;             // DRI table + cross-checking enabled
    double route_lifetime = 10.0;     // s, refreshed on use
    double discovery_timeout = 1.8;   // s; attempt k >= 1 waits k times this
    int discovery_retries = 3;        // extra attempts before giving up
    std::size_t buffer_cap = 64;      // packets per flow
    double frp_timeout = 2.0;         // s per cross-check step
    int hop_budget = 8;               // cross-check loop iterations
    std::uint32_t data_ttl = 64;
    bool dri_sharing = false;         // import trusted nodes' through bits as hints

    void validate() const;
};

enum class DropReason { Attacker, Overflow, NoRoute, Ttl };

const char* to_string(DropReason r);

/// One line of the cross-check audit log.
struct SessionRecord {
    SimTime time = 0.0;
    NodeId origin = kNoNode;
    std::uint32_t session_id = 0;
    NodeId destination = kNoNode;
    NodeId responder = kNoNode;
    std::vector<NodeId> chain;
    Verdict verdict = Verdict::InsecureUnverifiable;
    std::vector<NodeId> blackholes;
    std::string reason;
};

std::string format_record(const SessionRecord& r);

/// What a node can do to the outside world. Implemented by Network.
class Host {
public:
    virtual ~Host() = default;

    virtual SimTime now() const = 0;
    virtual void broadcast(NodeId from, const Message& msg) = 0;
    virtual LinkStatus unicast(NodeId from, NodeId to, const Message& msg) = 0;
    virtual EventId set_timer(NodeId node, double delay, std::string_view what,
                              std::function<void()> fn) = 0;
    virtual void cancel_timer(EventId id) = 0;
    virtual std::vector<NodeId> neighbors(NodeId node) const = 0;
    virtual Rng& behavior_rng() = 0;

    virtual void data_delivered(NodeId at, const DataPacket& pkt) = 0;
    virtual void data_dropped(NodeId at, const DataPacket& pkt, DropReason why) = 0;
    virtual void rrep_forged(NodeId attacker, const Rrep& rrep) = 0;
    virtual void session_closed(const SessionRecord& record) = 0;
};

/// An honest node: on-demand distance-vector routing, extended with the DRI
/// table and the cross-checking defense when `ProtocolParams::defense` is set.
class Router {
public:
    Router(NodeId id, Host& host, ProtocolParams params);
    virtual ~Router() = default;

    Router(const Router&) = delete;
    Router& operator=(const Router&) = delete;

    NodeId id() const { return id_; }
    virtual bool is_attacker() const { return false; }

    /// Entry point for every frame the medium delivers to this node.
    void receive(const Message& msg, NodeId prev_hop);

    /// Hands a locally generated data packet to the routing layer.
    void originate_data(DataPacket pkt);

    void originate_discovery(NodeId destination);

    bool is_reliable(NodeId candidate) const;
    void update_dri_secure(NodeId in_node);
    void broadcast_alarm(const std::vector<NodeId>& ids);

    const RoutingTable& routes() const { return routes_; }
    RoutingTable& routes() { return routes_; }
    const DriTable& dri() const { return dri_; }
    DriTable& dri() { return dri_; }
    const Blacklist& blacklist() const { return blacklist_; }
    SeqNum own_seq() const { return own_seq_; }
    const ProtocolParams& params() const { return params_; }

    bool discovery_pending(NodeId dest) const { return pending_.count(dest) != 0; }
    std::size_t buffered() const;
    std::size_t active_sessions() const { return sessions_.size(); }
    const std::map<std::uint32_t, CrossCheckSession>& sessions() const { return sessions_; }

protected:
    virtual void handle_rreq(const Rreq& rreq, NodeId prev_hop);
    virtual void handle_rrep(const Rrep& rrep, NodeId prev_hop);
    virtual void handle_rerr(const Rerr& rerr, NodeId prev_hop);
    virtual void handle_frq(const Frq& frq, NodeId prev_hop);
    virtual void handle_frp(const Frp& frp, NodeId prev_hop);
    virtual void handle_data(DataPacket pkt, NodeId prev_hop);
    virtual void handle_alarm(const Alarm& alarm, NodeId prev_hop);

    /// Marks (origin, rreq_id) as seen; false if it already was.
    bool first_sighting(const Rreq& rreq);
    void reply_as_destination(const Rreq& rreq, NodeId prev_hop);
    std::optional<NodeId> next_hop_toward(NodeId dest) const;
    /// Forwards a source-routed FRq/FRp to the hop after this node in `path`.
    void relay_along(const std::vector<NodeId>& path, const Message& msg);
    void send_source_routed(const std::vector<NodeId>& path, const Message& msg);

    Host& host_;
    const NodeId id_;
    ProtocolParams params_;
    RoutingTable routes_;
    DriTable dri_;

private:
    struct Discovery {
        int attempts = 0;
        EventId timer = 0;
    };

    void route_data(DataPacket pkt);
    const RouteEntry* data_route(NodeId dest, bool own) const;
    void buffer_packet(DataPacket pkt);
    void send_rreq(NodeId dest);
    void on_discovery_timeout(NodeId dest);
    void complete_discovery(NodeId dest);
    void handle_link_break(NodeId next_hop);
    RouteEntry forward_entry(const Rrep& rrep, NodeId prev_hop) const;

    void on_rrep_received(const Rrep& rrep, NodeId prev_hop);
    void accept_route(const Rrep& rrep, NodeId prev_hop);
    void send_frq(std::uint32_t session_id);
    void on_probe_reply(const Rrep& rrep, NodeId prev_hop);
    void on_session_timeout(std::uint32_t session_id);
    void close_session(std::uint32_t session_id, Verdict verdict, std::string reason,
                       std::vector<NodeId> blackholes = {});
    void blacklist_nodes(const std::vector<NodeId>& ids);

    Blacklist blacklist_;
    std::set<NodeId> reliable_hints_;
    SeqNum own_seq_ = 0;
    std::uint32_t next_rreq_id_ = 0;
    std::uint32_t next_session_id_ = 0;
    std::uint32_t next_alarm_id_ = 0;
    std::set<std::pair<NodeId, std::uint32_t>> seen_rreqs_;
    std::set<std::pair<NodeId, std::uint32_t>> seen_alarms_;
    std::map<NodeId, Discovery> pending_;
    std::map<std::uint32_t, std::deque<DataPacket>> buffers_;
    std::map<std::uint32_t, CrossCheckSession> sessions_;
};

}  // namespace bhsim
