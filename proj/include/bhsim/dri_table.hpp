#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bhsim/types.hpp"

namespace bhsim {

/// Per-neighbor data routing information: whether this node has routed data
/// received *from* the neighbor, and whether it has routed data *through* it.
struct DriEntry {
    bool from = false;
    bool through = false;

    friend bool operator==(const DriEntry&, const DriEntry&) = default;
};

std::string to_string(DriEntry e);  // "10", "01", ...

/// DRI table of one node. Absent entries read as (0,0); bits only go 0 -> 1.
class DriTable {
public:
    explicit DriTable(NodeId owner) : owner_(owner) {}

    void record_from(NodeId prev_hop);
    /// Data was handed to `next_hop` at the link layer.
    void record_through(NodeId next_hop);
    /// Sets the through bit after a successful cross-check, without any data
    /// having been sent.
    void mark_through(NodeId node);

    DriEntry get(NodeId node) const;
    bool through(NodeId node) const { return get(node).through; }
    /// The entry as told to other nodes: the through bit only counts data
    /// actually routed via `node`.
    DriEntry reported(NodeId node) const;

    /// Rows "node from through", ordered by node id.
    std::string dump() const;
    std::size_t size() const { return entries_.size(); }
    NodeId owner() const { return owner_; }

private:
    NodeId owner_;
    std::map<NodeId, DriEntry> entries_;
    std::set<NodeId> routed_;
};

/// Nodes this node has identified (or been told) are black holes.
class Blacklist {
public:
    /// Returns true if `node` was not already listed.
    bool add(NodeId node, SimTime when);
    bool contains(NodeId node) const { return ids_.count(node) != 0; }
    const std::set<NodeId>& ids() const { return ids_; }
    std::optional<SimTime> first_marked(NodeId node) const;
    bool empty() const { return ids_.empty(); }

private:
    std::set<NodeId> ids_;
    std::map<NodeId, SimTime> first_marked_;
};

}  // namespace bhsim
