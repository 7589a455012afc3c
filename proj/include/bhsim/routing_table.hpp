#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bhsim/types.hpp"

namespace bhsim {

struct RouteEntry {
    NodeId destination = kNoNode;
    NodeId next_hop = kNoNode;
    std::uint32_t hop_count = 0;
    SeqNum dest_seq = 0;
    SimTime lifetime_expiry = 0.0;
    bool valid = false;
    /// Installed by this node's own route discovery after passing the
    /// cross-check pipeline (defense mode only).
    bool secured = false;
    /// Instrumentation only: learned from a forged reply.
    bool tainted = false;

    bool usable(SimTime now) const { return valid && lifetime_expiry > now; }
};

/// True if `a` is preferred over `b`: higher sequence number, then fewer
/// hops, then the lower next-hop id.
bool preferred(const RouteEntry& a, const RouteEntry& b);

/// Best candidate by `preferred`. Throws ConfigError on an empty list.
const RouteEntry& select_route(std::span<const RouteEntry> candidates);

class RoutingTable {
public:
    explicit RoutingTable(NodeId owner) : owner_(owner) {}

    /// Entry for `dest` whether valid or not.
    const RouteEntry* find(NodeId dest) const;
    /// Entry for `dest` only if valid and unexpired at `now`.
    const RouteEntry* lookup(NodeId dest, SimTime now) const;

    /// Installs `candidate` if there is no entry, if it carries a newer
    /// sequence number, or an equal one with fewer hops. An invalid or expired
    /// entry is replaced by any candidate whose sequence number is not older.
    /// An identical route only has its lifetime extended. Returns true when
    /// the entry was (re)written.
    bool update(const RouteEntry& candidate, SimTime now);

    /// Unconditional overwrite; used for routes secured by the cross-check.
    void install(const RouteEntry& entry);

    void refresh(NodeId dest, SimTime expiry);

    /// Invalidates usable entries whose next hop is `next_hop`; returns
    /// (destination, dest_seq) of each.
    std::vector<std::pair<NodeId, SeqNum>> invalidate_via(NodeId next_hop, SimTime now);

    /// Invalidates `dest` if usable and routed via `next_hop` with dest_seq <= `seq`.
    bool invalidate_if(NodeId dest, NodeId next_hop, SeqNum seq, SimTime now);

    void for_each(const std::function<void(const RouteEntry&)>& fn) const;

    /// Rows "dest next_hop hops seq expiry valid", ordered by destination.
    std::string dump() const;

    std::size_t size() const { return routes_.size(); }

private:
    NodeId owner_;
    std::map<NodeId, RouteEntry> routes_;
};

}  // namespace bhsim
