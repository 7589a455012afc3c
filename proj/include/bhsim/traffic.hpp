#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "bhsim/rng.hpp"
#include "bhsim/routing_table.hpp"
#include "bhsim/types.hpp"

namespace bhsim {

/// Constant-bit-rate flow.
struct FlowSpec {
    std::uint32_t flow_id = 0;
    NodeId source = kNoNode;
    NodeId destination = kNoNode;
    double rate = 2.0;  // packets/s
    std::uint32_t payload = 512;
    SimTime start = 0.0;
    SimTime stop = 0.0;
};

struct FlowPlan {
    std::size_t count = 15;
    std::vector<NodeId> endpoints;  // honest nodes eligible as source/destination
    double rate = 2.0;
    std::uint32_t payload = 512;
    SimTime first_start = 50.0;     // traffic begins after mobility warm-up
    double start_window = 50.0;     // starts are staggered uniformly over this window
    SimTime stop = 1000.0;
};

/// Draws `count` flows over distinct (source, destination) pairs. Throws
/// ConfigError when there are fewer distinct pairs than requested.
std::vector<FlowSpec> generate_flows(const FlowPlan& plan, Rng& rng);

/// Per-packet send/delivery accounting. Deliveries are idempotent per
/// (flow, seq).
class TrafficLedger {
public:
    void record_sent(std::uint32_t flow_id, std::uint32_t seq);
    /// Returns false for a duplicate.
    bool record_delivered(std::uint32_t flow_id, std::uint32_t seq);

    std::uint64_t sent() const { return sent_; }
    std::uint64_t delivered() const { return delivered_.size(); }
    /// Absent when nothing was sent.
    std::optional<double> pdr() const;

private:
    static std::uint64_t key(std::uint32_t flow, std::uint32_t seq) {
        return (std::uint64_t{flow} << 32) | seq;
    }
    std::uint64_t sent_ = 0;
    std::unordered_set<std::uint64_t> delivered_;
};

struct ControlCounts {
    std::uint64_t rreq = 0;
    std::uint64_t rrep = 0;
    std::uint64_t rerr = 0;
    std::uint64_t frq = 0;
    std::uint64_t frp = 0;
    std::uint64_t alarm = 0;
};

struct RunMetrics {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::optional<double> pdr;
    std::uint64_t false_rreps = 0;         // sum of attacker counters
    std::uint64_t false_rreps_traced = 0;  // forged-reply events seen by the network
    std::uint64_t poisoned_nodes = 0;
    std::set<NodeId> blacklisted;
    std::optional<SimTime> detection_time;
    ControlCounts control;

    // Fate of every generated data packet.
    std::uint64_t attacker_dropped = 0;
    std::uint64_t overflow_dropped = 0;
    std::uint64_t no_route_dropped = 0;
    std::uint64_t ttl_dropped = 0;
    std::uint64_t link_lost = 0;
    std::uint64_t in_flight = 0;

    std::uint64_t secure_verdicts = 0;
    std::uint64_t blackhole_verdicts = 0;
    std::uint64_t unverifiable_verdicts = 0;

    std::uint64_t accounted() const {
        return delivered + attacker_dropped + overflow_dropped + no_route_dropped + ttl_dropped +
               link_lost + in_flight;
    }
    bool conserved() const { return sent == accounted(); }
    std::string conservation_line() const;
};

/// Number of nodes holding at least one usable route whose next hop is an
/// attacker.
std::uint64_t count_poisoned_nodes(std::span<const RoutingTable* const> tables,
                                   const std::set<NodeId>& attackers, SimTime now);

struct Stat {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation; 0 for a single value
    std::size_t n = 0;
};

/// Mean and sample standard deviation. n = 0 for an empty input.
Stat summarize(std::span<const double> values);

struct AggregateMetrics {
    std::size_t runs = 0;
    Stat sent, delivered;
    std::optional<Stat> pdr;  // mean of per-run ratios over runs with sent > 0
    Stat false_rreps, poisoned, blacklist_size;
    std::optional<Stat> detection_time;  // over runs with a detection
    Stat rreq, rrep, rerr, frq, frp, alarm;
};

/// Throws ConfigError on an empty list.
AggregateMetrics aggregate(std::span<const RunMetrics> runs);

}  // namespace bhsim
