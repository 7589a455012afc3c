#include "bhsim/routing_table.hpp"

#include <cstdio>
#include <sstream>

namespace bhsim {

bool preferred(const RouteEntry& a, const RouteEntry& b) {
    if (a.dest_seq != b.dest_seq) return a.dest_seq > b.dest_seq;
    if (a.hop_count != b.hop_count) return a.hop_count < b.hop_count;
    return a.next_hop < b.next_hop;
}

const RouteEntry& select_route(std::span<const RouteEntry> candidates) {
    if (candidates.empty()) throw ConfigError("select_route: no candidates");
    const RouteEntry* best = &candidates.front();
    for (const RouteEntry& c : candidates.subspan(1)) {
        if (preferred(c, *best)) best = &c;
    }
    return *best;
}

const RouteEntry* RoutingTable::find(NodeId dest) const {
    auto it = routes_.find(dest);
    return it == routes_.end() ? nullptr : &it->second;
}

const RouteEntry* RoutingTable::lookup(NodeId dest, SimTime now) const {
    const RouteEntry* e = find(dest);
    return e != nullptr && e->usable(now) ? e : nullptr;
}

bool RoutingTable::update(const RouteEntry& candidate, SimTime now) {
    if (candidate.destination == owner_ || candidate.destination == kNoNode) return false;
    auto [it, inserted] = routes_.try_emplace(candidate.destination, candidate);
    if (inserted) return true;
    RouteEntry& current = it->second;
    if (current.usable(now)) {
        if (candidate.next_hop == current.next_hop && candidate.dest_seq == current.dest_seq &&
            candidate.hop_count == current.hop_count) {
            if (candidate.lifetime_expiry > current.lifetime_expiry) {
                current.lifetime_expiry = candidate.lifetime_expiry;
            }
            return true;
        }
        const bool newer = candidate.dest_seq > current.dest_seq;
        const bool shorter =
            candidate.dest_seq == current.dest_seq && candidate.hop_count < current.hop_count;
        if (!newer && !shorter) return false;
    } else if (candidate.dest_seq < current.dest_seq) {
        return false;
    }
    current = candidate;
    return true;
}

void RoutingTable::install(const RouteEntry& entry) {
    if (entry.destination == owner_) return;
    routes_[entry.destination] = entry;
}

void RoutingTable::refresh(NodeId dest, SimTime expiry) {
    auto it = routes_.find(dest);
    if (it != routes_.end() && it->second.valid && it->second.lifetime_expiry < expiry) {
        it->second.lifetime_expiry = expiry;
    }
}

std::vector<std::pair<NodeId, SeqNum>> RoutingTable::invalidate_via(NodeId next_hop, SimTime now) {
    std::vector<std::pair<NodeId, SeqNum>> out;
    for (auto& [dest, e] : routes_) {
        if (e.next_hop == next_hop && e.usable(now)) {
            // The bumped number keeps stale replies from reinstating the route.
            e.valid = false;
            ++e.dest_seq;
            out.emplace_back(dest, e.dest_seq);
        }
    }
    return out;
}

bool RoutingTable::invalidate_if(NodeId dest, NodeId next_hop, SeqNum seq, SimTime now) {
    auto it = routes_.find(dest);
    if (it == routes_.end()) return false;
    RouteEntry& e = it->second;
    if (!e.usable(now) || e.next_hop != next_hop || e.dest_seq > seq) return false;
    e.valid = false;
    e.dest_seq = seq;
    return true;
}

void RoutingTable::for_each(const std::function<void(const RouteEntry&)>& fn) const {
    for (const auto& [dest, e] : routes_) fn(e);
}

std::string RoutingTable::dump() const {
    std::ostringstream out;
    char expiry[32];
    for (const auto& [dest, e] : routes_) {
        std::snprintf(expiry, sizeof expiry, "%.6f", e.lifetime_expiry);
        out << dest << ' ' << e.next_hop << ' ' << e.hop_count << ' ' << e.dest_seq << ' '
            << expiry << ' ' << (e.valid ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace bhsim
