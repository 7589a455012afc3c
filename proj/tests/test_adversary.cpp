#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace bhsim;
using namespace bhsim::testing;

namespace {

BlackholeRouter& attacker(Network& net, NodeId id) {
    return dynamic_cast<BlackholeRouter&>(net.node(id));
}

Rreq request(NodeId origin, NodeId dest, SeqNum known) {
    Rreq r;
    r.origin = origin;
    r.rreq_id = 1;
    r.destination = dest;
    r.dest_seq_known = known;
    r.hop_count = 3;
    return r;
}

AttackerConfig lone(NodeId id) {
    AttackerConfig a;
    a.node = id;
    return a;
}

std::size_t lines_with(const std::string& text, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

}  // namespace

TEST(Adversary, ForgedReplyIsMaximallyAttractive) {
    auto net = static_network(golden::positions(), quiet_params(true), golden::attackers());
    const Rrep r = attacker(*net, golden::B1).forge_rrep(request(golden::S, golden::D, 7));
    EXPECT_EQ(r.destination, golden::D);
    EXPECT_EQ(r.dest_seq, 7u + 30u);
    EXPECT_EQ(r.hop_count, 1u);
    EXPECT_EQ(r.origin, golden::S);
    EXPECT_EQ(r.responder, golden::B1);
    EXPECT_EQ(r.responder_next_hop, std::optional<NodeId>{golden::B2});
    EXPECT_EQ(r.responder_dri_for_next_hop, (DriEntry{false, true}));
    EXPECT_TRUE(r.tainted);
}

TEST(Adversary, PlainAodvForgeryCarriesNoDefenseFields) {
    auto net = static_network(golden::positions(), quiet_params(false), golden::attackers());
    const Rrep r = attacker(*net, golden::B1).forge_rrep(request(golden::S, golden::D, 0));
    EXPECT_EQ(r.dest_seq, 30u);
    EXPECT_FALSE(r.responder_next_hop.has_value());
    EXPECT_FALSE(r.responder_dri_for_next_hop.has_value());
}

TEST(Adversary, AnswersEveryRequestItHears) {
    auto net = static_network(line(3, 150), quiet_params(), {lone(1)});
    net->node(0).originate_discovery(2);
    net->run_until(0.5);
    EXPECT_EQ(attacker(*net, 1).count_false_rrep(), 1u);
    const RouteEntry* r = net->node(0).routes().lookup(2, net->now());
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(r->next_hop, 1u);
    EXPECT_TRUE(r->tainted);
    // The request never got past the attacker.
    EXPECT_EQ(net->metrics().control.rreq, 1u);
}

TEST(Adversary, ExcludedAttackerStaysSilent) {
    auto net = static_network(line(3, 150), quiet_params(), {lone(1)});
    Rreq r = request(0, 2, 0);
    r.excluded = {1};
    net->node(1).receive(r, 0);
    EXPECT_EQ(attacker(*net, 1).count_false_rrep(), 0u);
}

TEST(Adversary, CountMatchesForgeTraceLines) {
    auto net = static_network(golden::positions(), quiet_params(), golden::attackers());
    std::ostringstream trace;
    net->set_trace(&trace);
    net->add_flow(flow(1, golden::S, golden::D, 1.0, 20.0));
    net->add_flow(flow(2, golden::N2, golden::N6, 2.0, 20.0));
    net->run_until(30.0);
    const RunMetrics m = net->metrics();
    const std::uint64_t both =
        attacker(*net, golden::B1).count_false_rrep() + attacker(*net, golden::B2).count_false_rrep();
    EXPECT_GE(both, 2u);
    EXPECT_EQ(m.false_rreps, both);
    EXPECT_EQ(lines_with(trace.str(), "kind=FORGE"), both);
}

TEST(Adversary, DropsRelayedDataButAcceptsItsOwn) {
    auto net = static_network(line(3, 150), quiet_params(), {lone(1)});
    net->add_flow(flow(1, 0, 2, 1.0, 3.0));
    net->add_flow(flow(2, 0, 1, 1.0, 3.0));
    net->run_until(5.0);
    const RunMetrics m = net->metrics();
    EXPECT_EQ(m.sent, 8u);
    EXPECT_EQ(m.delivered, 4u);
    EXPECT_EQ(m.attacker_dropped, 4u);
    EXPECT_EQ(attacker(*net, 1).dropped(), 4u);
    EXPECT_TRUE(m.conserved()) << m.conservation_line();
    // The drop is still recorded as data received from the source.
    EXPECT_TRUE(net->node(1).dri().get(0).from);
}

TEST(Adversary, ColluderVouchesForPartner) {
    auto net = static_network(golden::positions(), quiet_params(true), golden::attackers(), 3);
    Frq q;
    q.origin = golden::S;
    q.target = golden::B2;
    q.queried_in = golden::B1;
    q.destination = golden::D;
    q.session_id = 4;
    q.path = {golden::S, golden::N2, golden::N4, golden::B2};
    const Frp f = attacker(*net, golden::B2).collude_frp(q);
    EXPECT_EQ(f.dri_for_in, (DriEntry{true, true}));
    ASSERT_TRUE(f.responder_next_hop.has_value());
    EXPECT_TRUE(*f.responder_next_hop == golden::N4 || *f.responder_next_hop == golden::N6);
    EXPECT_EQ(f.dri_for_responder_next_hop, (DriEntry{false, true}));
    EXPECT_EQ(f.path, (std::vector<NodeId>{golden::B2, golden::N4, golden::N2, golden::S}));
}

TEST(Adversary, ColluderWithoutHonestNeighborsNamesDestination) {
    std::vector<Position> pos{{100, 100}, {250, 100}, {900, 900}};
    AttackerConfig a{0, AttackerRole::Primary, 1, 30, std::nullopt};
    AttackerConfig b{1, AttackerRole::Colluder, 0, 30, std::nullopt};
    auto net = static_network(pos, quiet_params(true), {a, b});
    Frq q;
    q.target = 1;
    q.queried_in = 0;
    q.destination = 2;
    const Frp f = attacker(*net, 1).collude_frp(q);
    EXPECT_EQ(f.responder_next_hop, std::optional<NodeId>{2});
}

TEST(Adversary, ColluderAnswersOthersTruthfully) {
    auto net = static_network(golden::positions(), quiet_params(true), golden::attackers());
    Frq q;
    q.target = golden::B2;
    q.queried_in = golden::N4;
    q.destination = golden::D;
    const Frp f = attacker(*net, golden::B2).collude_frp(q);
    EXPECT_EQ(f.dri_for_in, (DriEntry{false, false}));
    EXPECT_FALSE(f.responder_next_hop.has_value());
    // A primary never vouches, even when asked about its partner.
    q.target = golden::B1;
    q.queried_in = golden::B2;
    EXPECT_EQ(attacker(*net, golden::B1).collude_frp(q).dri_for_in, (DriEntry{false, false}));
}

TEST(Adversary, SwallowsRepliesAndAlarms) {
    auto net = static_network(line(3, 150), quiet_params(true), {lone(1)});
    Alarm alarm{0, {7}, 1};
    net->node(1).receive(alarm, 0);
    EXPECT_TRUE(net->node(1).blacklist().empty());
    Rrep rrep;
    rrep.destination = 2;
    rrep.origin = 0;
    rrep.responder = 2;
    rrep.trace = {2};
    net->node(1).receive(rrep, 2);
    EXPECT_EQ(net->node(1).routes().size(), 0u);
    EXPECT_EQ(net->metrics().control.rrep, 0u);
}
