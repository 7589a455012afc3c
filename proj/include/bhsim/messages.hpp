#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bhsim/dri_table.hpp"
#include "bhsim/types.hpp"

namespace bhsim {

struct Rreq {
    NodeId origin = kNoNode;
    SeqNum origin_seq = 0;
    std::uint32_t rreq_id = 0;
    NodeId destination = kNoNode;
    SeqNum dest_seq_known = 0;
    std::uint32_t hop_count = 0;
    /// Nodes that must neither answer nor relay this request.
    std::vector<NodeId> excluded;
    /// Non-zero for the path probes of a cross-check session; only the
    /// destination answers those.
    std::uint32_t probe_session = 0;
};

struct Rrep {
    NodeId destination = kNoNode;
    SeqNum dest_seq = 0;
    std::uint32_t hop_count = 0;
    NodeId origin = kNoNode;
    NodeId responder = kNoNode;
    std::optional<NodeId> responder_next_hop;
    std::optional<DriEntry> responder_dri_for_next_hop;
    std::uint32_t probe_session = 0;
    /// Nodes the reply has traversed, starting with the responder.
    std::vector<NodeId> trace;
    /// Instrumentation only: the reply was forged by an attacker, or
    /// answered from a route that was.
    bool tainted = false;
};

struct Rerr {
    std::vector<std::pair<NodeId, SeqNum>> unreachable;
};

/// Further request: asks `target` about its data history with `queried_in`
/// and its own next hop toward `destination`. Source-routed along `path`.
struct Frq {
    NodeId origin = kNoNode;
    NodeId target = kNoNode;
    NodeId queried_in = kNoNode;
    NodeId destination = kNoNode;
    std::uint32_t session_id = 0;
    std::vector<NodeId> path;  // origin ... target
};

struct Frp {
    std::uint32_t session_id = 0;
    NodeId responder = kNoNode;
    DriEntry dri_for_in;
    std::optional<NodeId> responder_next_hop;
    std::optional<DriEntry> dri_for_responder_next_hop;
    std::vector<NodeId> path;  // responder ... origin
};

struct DataPacket {
    std::uint32_t flow_id = 0;
    std::uint32_t seq = 0;
    NodeId origin = kNoNode;
    NodeId destination = kNoNode;
    std::uint32_t payload_size = 512;
    std::uint32_t ttl = 64;
    /// Instrumentation only: every node that has held the packet, in order.
    std::vector<NodeId> hop_trace;
};

struct Alarm {
    NodeId reporter = kNoNode;
    std::vector<NodeId> blackholes;
    std::uint32_t alarm_id = 0;
};

using Message = std::variant<Rreq, Rrep, Rerr, Frq, Frp, DataPacket, Alarm>;

enum class MessageType : std::uint8_t { Rreq, Rrep, Rerr, Frq, Frp, Data, Alarm };

inline MessageType type_of(const Message& m) { return static_cast<MessageType>(m.index()); }
const char* to_string(MessageType t);

/// One-line summary used by the event trace.
std::string summarize(const Message& m);

}  // namespace bhsim
