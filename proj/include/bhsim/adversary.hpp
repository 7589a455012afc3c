#pragma once

#include <cstdint>
#include <optional>
#include <set>

#include "bhsim/router.hpp"

namespace bhsim {

enum class AttackerRole { Primary, Colluder };

struct AttackerConfig {
    NodeId node = kNoNode;
    AttackerRole role = AttackerRole::Primary;
    /// Named as next hop in forged replies; a colluder vouches for its partner.
    NodeId partner = kNoNode;
    SeqNum fabricated_seq_boost = 30;
    /// Colluder only: the node named as its own next hop when vouching. When
    /// unset, a random honest neighbor is named.
    std::optional<NodeId> chain_next;
};

/// Cooperative black hole.
///
/// Answers every route request it hears with a forged, maximally attractive
/// reply naming its partner as next hop, silently drops all data it is asked
/// to forward, and (as colluder) vouches for its partner when cross-checked.
class BlackholeRouter : public Router {
public:
    BlackholeRouter(NodeId id, Host& host, ProtocolParams params, AttackerConfig config,
                    std::set<NodeId> coalition);

    bool is_attacker() const override { return true; }
    const AttackerConfig& config() const { return config_; }

    Rrep forge_rrep(const Rreq& rreq) const;
    /// Reply to an FRq targeting this node.
    Frp collude_frp(const Frq& frq);

    std::uint64_t count_false_rrep() const { return false_rreps_; }
    std::uint64_t dropped() const { return dropped_; }

protected:
    void handle_rreq(const Rreq& rreq, NodeId prev_hop) override;
    void handle_rrep(const Rrep& rrep, NodeId prev_hop) override;
    void handle_rerr(const Rerr& rerr, NodeId prev_hop) override;
    void handle_frq(const Frq& frq, NodeId prev_hop) override;
    void handle_frp(const Frp& frp, NodeId prev_hop) override;
    void handle_data(DataPacket pkt, NodeId prev_hop) override;
    void handle_alarm(const Alarm& alarm, NodeId prev_hop) override;

private:
    AttackerConfig config_;
    std::set<NodeId> coalition_;
    std::uint64_t false_rreps_ = 0;
    std::uint64_t dropped_ = 0;
};

}  // namespace bhsim
