#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "bhsim/routing_table.hpp"
#include "support.hpp"

using namespace bhsim;
using namespace bhsim::testing;

namespace {

RouteEntry entry(NodeId dest, NodeId next, std::uint32_t hops, SeqNum seq, SimTime expiry = 100.0) {
    RouteEntry e;
    e.destination = dest;
    e.next_hop = next;
    e.hop_count = hops;
    e.dest_seq = seq;
    e.lifetime_expiry = expiry;
    e.valid = true;
    return e;
}

std::size_t count_kind(const std::string& trace, const std::string& needle) {
    std::size_t n = 0;
    std::istringstream in(trace);
    std::string line;
    while (std::getline(in, line)) n += line.find(needle) != std::string::npos ? 1 : 0;
    return n;
}

}  // namespace

TEST(SelectRoute, HigherSequenceWins) {
    std::vector<RouteEntry> c{entry(9, 1, 3, 5), entry(9, 2, 6, 7)};
    const RouteEntry& r = select_route(c);
    EXPECT_EQ(r.dest_seq, 7u);
    EXPECT_EQ(r.hop_count, 6u);
}

TEST(SelectRoute, EqualSequenceFewerHopsWins) {
    std::vector<RouteEntry> c{entry(9, 1, 6, 7), entry(9, 2, 2, 7)};
    EXPECT_EQ(select_route(c).hop_count, 2u);
}

TEST(SelectRoute, SingleAndEmpty) {
    std::vector<RouteEntry> one{entry(9, 1, 4, 1)};
    EXPECT_EQ(select_route(one).next_hop, 1u);
    std::vector<RouteEntry> none;
    EXPECT_THROW(select_route(none), ConfigError);
}

TEST(SelectRoute, FinalTieBreakIsLowerNextHop) {
    std::vector<RouteEntry> c{entry(9, 5, 2, 7), entry(9, 3, 2, 7)};
    EXPECT_EQ(select_route(c).next_hop, 3u);
}

TEST(RoutingTable, UpdateFollowsFreshnessRule) {
    RoutingTable t(0);
    EXPECT_TRUE(t.update(entry(9, 1, 3, 5), 0.0));
    EXPECT_FALSE(t.update(entry(9, 2, 2, 4), 0.0));  // older
    EXPECT_FALSE(t.update(entry(9, 2, 3, 5), 0.0));  // same seq, not shorter
    EXPECT_TRUE(t.update(entry(9, 2, 2, 5), 0.0));   // same seq, shorter
    EXPECT_EQ(t.find(9)->next_hop, 2u);
    EXPECT_TRUE(t.update(entry(9, 3, 8, 6), 0.0));   // newer, even if longer
    EXPECT_EQ(t.find(9)->next_hop, 3u);
}

TEST(RoutingTable, IdenticalRouteOnlyExtendsLifetime) {
    RoutingTable t(0);
    t.update(entry(9, 1, 3, 5, 10.0), 0.0);
    EXPECT_TRUE(t.update(entry(9, 1, 3, 5, 20.0), 0.0));
    EXPECT_DOUBLE_EQ(t.find(9)->lifetime_expiry, 20.0);
}

TEST(RoutingTable, ExpiredRouteIsNotUsable) {
    RoutingTable t(0);
    t.update(entry(9, 1, 3, 5, 10.0), 0.0);
    EXPECT_NE(t.lookup(9, 9.0), nullptr);
    EXPECT_EQ(t.lookup(9, 10.5), nullptr);
    // Expired entries accept equal-or-newer replacements.
    EXPECT_TRUE(t.update(entry(9, 2, 7, 5, 30.0), 11.0));
    EXPECT_FALSE(t.update(entry(9, 2, 1, 4, 30.0), 40.0));
}

TEST(RoutingTable, NoRouteToSelf) {
    RoutingTable t(3);
    EXPECT_FALSE(t.update(entry(3, 1, 1, 1), 0.0));
    EXPECT_EQ(t.find(3), nullptr);
}

TEST(RoutingTable, InvalidateViaBumpsSequence) {
    RoutingTable t(0);
    t.update(entry(7, 1, 2, 4), 0.0);
    t.update(entry(8, 1, 3, 9), 0.0);
    t.update(entry(9, 2, 1, 1), 0.0);
    const auto lost = t.invalidate_via(1, 0.0);
    ASSERT_EQ(lost.size(), 2u);
    EXPECT_EQ(lost[0], (std::pair<NodeId, SeqNum>{7, 5}));
    EXPECT_EQ(lost[1], (std::pair<NodeId, SeqNum>{8, 10}));
    EXPECT_EQ(t.lookup(7, 0.0), nullptr);
    EXPECT_NE(t.lookup(9, 0.0), nullptr);
    // The stale route cannot come back.
    EXPECT_FALSE(t.update(entry(7, 1, 2, 4), 0.0));
}

TEST(RoutingTable, ErrorForOlderRouteKeepsNewerEntry) {
    RoutingTable t(0);
    t.update(entry(7, 1, 2, 4), 0.0);
    // A fresher reply lands before the error naming seq 4 arrives.
    t.update(entry(7, 1, 2, 6), 0.0);
    EXPECT_FALSE(t.invalidate_if(7, 1, 5, 0.0));
    EXPECT_NE(t.lookup(7, 0.0), nullptr);
    EXPECT_FALSE(t.invalidate_if(7, 2, 9, 0.0));  // different next hop
    EXPECT_TRUE(t.invalidate_if(7, 1, 6, 0.0));
    EXPECT_EQ(t.lookup(7, 0.0), nullptr);
}

TEST(RoutingTable, DumpIsOrderedByDestination) {
    RoutingTable t(0);
    t.update(entry(9, 2, 1, 1, 12.5), 0.0);
    t.update(entry(3, 1, 2, 4, 10.0), 0.0);
    EXPECT_EQ(t.dump(), "3 1 2 4 10.000000 1\n9 2 1 1 12.500000 1\n");
}

TEST(Aodv, ChainDiscoveryInstallsForwardRoutes) {
    auto net = static_network(line(3, 150));  // S=0 - A=1 - D=2
    net->add_flow(flow(1, 0, 2, 1.0, 1.1));
    net->run_until(5.0);
    const RouteEntry* at_a = net->node(1).routes().find(2);
    const RouteEntry* at_s = net->node(0).routes().find(2);
    ASSERT_NE(at_a, nullptr);
    ASSERT_NE(at_s, nullptr);
    EXPECT_EQ(at_a->next_hop, 2u);
    EXPECT_EQ(at_a->hop_count, 1u);
    EXPECT_EQ(at_s->next_hop, 1u);
    EXPECT_EQ(at_s->hop_count, 2u);
}

TEST(Aodv, DataFollowsHopTrace) {
    auto net = static_network(line(3, 150));
    std::vector<std::vector<NodeId>> traces;
    net->on_delivery([&](const DataPacket& p) { traces.push_back(p.hop_trace); });
    net->add_flow(flow(1, 0, 2, 1.0, 1.1));
    net->run_until(5.0);
    ASSERT_EQ(traces.size(), 1u);
    EXPECT_EQ(traces[0], (std::vector<NodeId>{0, 1, 2}));
}

TEST(Aodv, EachNodeRebroadcastsOnce) {
    auto net = static_network(line(3, 150));
    std::ostringstream trace;
    net->set_trace(&trace);
    net->add_flow(flow(1, 0, 2, 1.0, 1.1));
    net->run_until(5.0);
    // S originates, A relays, D answers instead of relaying.
    EXPECT_EQ(net->metrics().control.rreq, 2u);
    EXPECT_EQ(count_kind(trace.str(), "kind=BCAST detail=origin=0"), 2u);
}

TEST(Aodv, ExistingRouteSkipsDiscovery) {
    auto net = static_network(line(3, 150));
    net->add_flow(flow(1, 0, 2, 1.0, 3.0));
    net->run_until(5.0);
    const RunMetrics m = net->metrics();
    EXPECT_EQ(m.control.rreq, 2u);
    EXPECT_EQ(m.delivered, m.sent);
}

TEST(Aodv, PendingDiscoveryCoalesces) {
    // Nobody answers: the destination is isolated.
    std::vector<Position> pos{{50, 50}, {900, 900}};
    auto lonely = static_network(pos);
    DataPacket p;
    p.flow_id = 1;
    p.origin = 0;
    p.destination = 1;
    lonely->node(0).originate_data(p);
    p.seq = 1;
    lonely->node(0).originate_data(p);
    EXPECT_TRUE(lonely->node(0).discovery_pending(1));
    EXPECT_EQ(lonely->node(0).buffered(), 2u);
    EXPECT_EQ(lonely->metrics().control.rreq, 1u);
}

TEST(Aodv, FailedDiscoveryDropsBufferedPackets) {
    std::vector<Position> pos{{50, 50}, {900, 900}};
    auto net = static_network(pos);
    net->add_flow(flow(1, 0, 1, 1.0, 2.0));
    net->run_until(60.0);
    const RunMetrics m = net->metrics();
    EXPECT_EQ(m.delivered, 0u);
    EXPECT_EQ(m.no_route_dropped, m.sent);
    EXPECT_TRUE(m.conserved());
    // One request plus the configured retries.
    EXPECT_EQ(m.control.rreq, 1u + ProtocolParams{}.discovery_retries);
}

TEST(Aodv, StaleIntermediateRouteMustNotAnswer) {
    auto net = static_network(line(3, 150));
    // A believes in an old route to D; S asks for something fresher.
    RouteEntry stale = entry(2, 2, 1, 3, 1000.0);
    net->node(1).routes().install(stale);
    RouteEntry known = entry(2, 1, 2, 5, 0.0);
    known.valid = false;
    net->node(0).routes().install(known);
    std::ostringstream trace;
    net->set_trace(&trace);
    net->node(0).originate_discovery(2);
    net->run_until(2.0);
    // A rebroadcast rather than answering from its stale entry.
    EXPECT_EQ(count_kind(trace.str(), "node=1 kind=BCAST detail=origin=0"), 1u);
    const RouteEntry* r = net->node(0).routes().lookup(2, net->now());
    ASSERT_NE(r, nullptr);
    EXPECT_GE(r->dest_seq, 5u);
}

TEST(Aodv, FreshIntermediateRouteAnswers) {
    auto net = static_network(line(4, 150));  // 0-1-2-3
    net->add_flow(flow(1, 1, 3, 1.0, 1.1));    // node 1 learns a route to 3
    net->run_until(2.0);
    std::ostringstream trace;
    net->set_trace(&trace);
    net->node(0).originate_discovery(3);
    net->run_until(3.0);
    EXPECT_EQ(count_kind(trace.str(), "node=1 kind=UNICAST detail=to=0 dst=3"), 1u);
    EXPECT_EQ(count_kind(trace.str(), "node=1 kind=BCAST detail=origin=0"), 0u);
    EXPECT_EQ(net->node(0).routes().lookup(3, net->now())->hop_count, 3u);
}

TEST(Aodv, LinkBreakSendsErrorTowardSource) {
    auto net = static_network(line(3, 150));
    net->add_flow(flow(1, 0, 2, 1.0, 20.0));
    net->run_until(5.0);
    // D walks away; A's next transmission fails.
    net->field().state(2).current = {900, 900};
    net->run_until(6.0);
    const RunMetrics m = net->metrics();
    EXPECT_GE(m.control.rerr, 1u);
    EXPECT_EQ(net->node(0).routes().lookup(2, net->now()), nullptr);
    EXPECT_FALSE(net->node(1).routes().find(2)->valid);
}

TEST(Aodv, BufferOverflowDropsOldest) {
    std::vector<Position> pos{{50, 50}, {900, 900}};
    NetworkParams p = quiet_params();
    p.protocol.buffer_cap = 4;
    auto net = static_network(pos, p);
    for (std::uint32_t i = 0; i < 6; ++i) {
        DataPacket d;
        d.flow_id = 1;
        d.seq = i;
        d.origin = 0;
        d.destination = 1;
        net->node(0).originate_data(d);
    }
    EXPECT_EQ(net->node(0).buffered(), 4u);
    EXPECT_EQ(net->metrics().overflow_dropped, 2u);
}

TEST(Aodv, OwnSequenceNumberNeverDecreases) {
    Rng rng(21);
    auto pos = random_connected(10, 500, 200, rng);
    auto net = static_network(pos);
    for (std::uint32_t f = 0; f < 6; ++f) {
        const NodeId s = static_cast<NodeId>(rng.below(10));
        NodeId d = static_cast<NodeId>(rng.below(10));
        if (d == s) d = (d + 1) % 10;
        net->add_flow(flow(f + 1, s, d, 1.0 + f, 30.0));
    }
    std::vector<SeqNum> last(10, 0);
    for (int t = 1; t <= 40; ++t) {
        net->run_until(t);
        for (NodeId n = 0; n < 10; ++n) {
            ASSERT_GE(net->node(n).own_seq(), last[n]);
            last[n] = net->node(n).own_seq();
        }
    }
}

// Property: on static connected topologies with no loss and no attackers
// every packet arrives, and no delivered packet visits a node twice.
TEST(Aodv, StaticTopologiesDeliverEverythingWithoutLoops) {
    Rng rng(99);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = 4 + rng.below(9);
        auto pos = random_connected(n, 600, 200, rng);
        auto net = static_network(pos, quiet_params(), {}, 100 + trial);
        bool loop_free = true;
        net->on_delivery([&](const DataPacket& p) {
            std::set<NodeId> seen(p.hop_trace.begin(), p.hop_trace.end());
            loop_free = loop_free && seen.size() == p.hop_trace.size();
        });
        for (std::uint32_t f = 0; f < 4; ++f) {
            const NodeId s = static_cast<NodeId>(rng.below(n));
            const NodeId d = static_cast<NodeId>((s + 1 + rng.below(n - 1)) % n);
            net->add_flow(flow(f + 1, s, d, 1.0 + rng.uniform(0, 5), 40.0));
        }
        net->run_until(60.0);
        const RunMetrics m = net->metrics();
        EXPECT_TRUE(loop_free) << "trial " << trial;
        EXPECT_EQ(m.delivered, m.sent) << "trial " << trial;
        EXPECT_TRUE(m.conserved()) << m.conservation_line();
    }
}

// Property: a single discovery on a static graph installs a shortest path.
// Rebroadcast jitter is kept below one per-hop delay across the diameter, so
// the first copy of the request to reach any node came along a shortest path.
TEST(Aodv, DiscoveryMatchesBreadthFirstSearch) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(11);
        auto pos = random_connected(n, 700, 200, rng);
        NetworkParams p = quiet_params();
        p.medium.broadcast_jitter_max = 0.0001;
        auto net = static_network(pos, p, {}, trial + 1);
        const NodeId dst = static_cast<NodeId>(1 + rng.below(n - 1));
        net->node(0).originate_discovery(dst);
        net->run_until(1.0);
        const RouteEntry* r = net->node(0).routes().lookup(dst, net->now());
        ASSERT_NE(r, nullptr) << "trial " << trial;
        EXPECT_EQ(int(r->hop_count), bfs_hops(pos, 0, 200)[dst]) << "trial " << trial;
    }
}
