#include "bhsim/traffic.hpp"

#include <cmath>
#include <sstream>

namespace bhsim {

std::vector<FlowSpec> generate_flows(const FlowPlan& plan, Rng& rng) {
    const std::size_t n = plan.endpoints.size();
    const std::size_t pairs = n < 2 ? 0 : n * (n - 1);
    if (plan.count > pairs) {
        throw ConfigError("flow_count " + std::to_string(plan.count) + " exceeds the " +
                          std::to_string(pairs) + " distinct endpoint pairs");
    }
    if (!(plan.rate > 0.0)) throw ConfigError("packet_rate must be > 0");

    // Partial Fisher-Yates over the enumerated ordered pairs.
    std::vector<std::uint32_t> order(pairs);
    for (std::size_t i = 0; i < pairs; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::vector<FlowSpec> flows;
    flows.reserve(plan.count);
    for (std::size_t i = 0; i < plan.count; ++i) {
        const std::size_t j = i + rng.below(pairs - i);
        std::swap(order[i], order[j]);
        const std::size_t src = order[i] / (n - 1);
        std::size_t dst = order[i] % (n - 1);
        if (dst >= src) ++dst;
        FlowSpec f;
        f.flow_id = static_cast<std::uint32_t>(i + 1);
        f.source = plan.endpoints[src];
        f.destination = plan.endpoints[dst];
        f.rate = plan.rate;
        f.payload = plan.payload;
        f.start = plan.first_start + rng.uniform(0.0, plan.start_window);
        f.stop = plan.stop;
        flows.push_back(f);
    }
    return flows;
}

void TrafficLedger::record_sent(std::uint32_t, std::uint32_t) { ++sent_; }

bool TrafficLedger::record_delivered(std::uint32_t flow_id, std::uint32_t seq) {
    return delivered_.insert(key(flow_id, seq)).second;
}

std::optional<double> TrafficLedger::pdr() const {
    if (sent_ == 0) return std::nullopt;
    return static_cast<double>(delivered()) / static_cast<double>(sent_);
}

std::string RunMetrics::conservation_line() const {
    std::ostringstream out;
    out << "conservation sent=" << sent << " delivered=" << delivered
        << " attacker_dropped=" << attacker_dropped << " overflow_dropped=" << overflow_dropped
        << " no_route_dropped=" << no_route_dropped << " ttl_dropped=" << ttl_dropped
        << " link_lost=" << link_lost << " in_flight=" << in_flight
        << (conserved() ? " ok" : " MISMATCH");
    return out.str();
}

std::uint64_t count_poisoned_nodes(std::span<const RoutingTable* const> tables,
                                   const std::set<NodeId>& attackers, SimTime now) {
    if (attackers.empty()) return 0;
    std::uint64_t poisoned = 0;
    for (const RoutingTable* table : tables) {
        bool hit = false;
        table->for_each([&](const RouteEntry& e) {
            if (!hit && e.usable(now) && attackers.count(e.next_hop) != 0) hit = true;
        });
        if (hit) ++poisoned;
    }
    return poisoned;
}

Stat summarize(std::span<const double> values) {
    Stat s;
    s.n = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(sq / static_cast<double>(s.n - 1));
    }
    return s;
}

AggregateMetrics aggregate(std::span<const RunMetrics> runs) {
    if (runs.empty()) throw ConfigError("aggregate: no runs");
    auto field = [&](auto get) {
        std::vector<double> v;
        v.reserve(runs.size());
        for (const RunMetrics& r : runs) v.push_back(static_cast<double>(get(r)));
        return summarize(v);
    };
    AggregateMetrics a;
    a.runs = runs.size();
    a.sent = field([](const RunMetrics& r) { return r.sent; });
    a.delivered = field([](const RunMetrics& r) { return r.delivered; });
    std::vector<double> pdrs, detections;
    for (const RunMetrics& r : runs) {
        if (r.pdr) pdrs.push_back(*r.pdr);
        if (r.detection_time) detections.push_back(*r.detection_time);
    }
    if (!pdrs.empty()) a.pdr = summarize(pdrs);
    if (!detections.empty()) a.detection_time = summarize(detections);
    a.false_rreps = field([](const RunMetrics& r) { return r.false_rreps; });
    a.poisoned = field([](const RunMetrics& r) { return r.poisoned_nodes; });
    a.blacklist_size = field([](const RunMetrics& r) { return r.blacklisted.size(); });
    a.rreq = field([](const RunMetrics& r) { return r.control.rreq; });
    a.rrep = field([](const RunMetrics& r) { return r.control.rrep; });
    a.rerr = field([](const RunMetrics& r) { return r.control.rerr; });
    a.frq = field([](const RunMetrics& r) { return r.control.frq; });
    a.frp = field([](const RunMetrics& r) { return r.control.frp; });
    a.alarm = field([](const RunMetrics& r) { return r.control.alarm; });
    return a;
}

}  // namespace bhsim
