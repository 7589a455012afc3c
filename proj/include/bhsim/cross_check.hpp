#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bhsim/dri_table.hpp"
#include "bhsim/engine.hpp"
#include "bhsim/messages.hpp"

namespace bhsim {

enum class Verdict { SecureRoute, BlackholesFound, Continue, InsecureUnverifiable };

const char* to_string(Verdict v);

/// State of one cross-check of an RREP produced by a node the origin does
/// not consider reliable.
///
/// The session walks the chain of claimed next hops, starting at the RREP
/// generator, asking each claimed next hop about the node before it, until a
/// reliable node answers.
struct CrossCheckSession {
    enum class Phase { Probing, AwaitingFrp };

    std::uint32_t session_id = 0;
    NodeId origin = kNoNode;
    NodeId destination = kNoNode;
    NodeId rrep_generator = kNoNode;
    NodeId current_in = kNoNode;
    std::optional<DriEntry> current_in_claimed_dri;
    std::optional<NodeId> current_nhn;
    /// Every intermediate node visited so far, in visit order. suspects[0] is
    /// the RREP generator and suspects.back() is current_in; this is also the
    /// reverse path walked back by mark_blackholes.
    std::vector<NodeId> suspects;
    int hop_budget = 8;

    // Bookkeeping for acting on the verdict.
    Rrep rrep;
    NodeId rrep_prev_hop = kNoNode;
    Phase phase = Phase::Probing;
    EventId timer = 0;
    SimTime started = 0.0;

    bool is_suspect(NodeId n) const;
};

/// Opens a session for `rrep` received by `origin` from `prev_hop`.
CrossCheckSession open_session(std::uint32_t session_id, NodeId origin, const Rrep& rrep,
                               NodeId prev_hop, int hop_budget, SimTime now);

enum class RrepAction { Ignore, SecureRoute, StartCrossCheck };

/// First decision an origin takes on an RREP answering its own discovery.
RrepAction classify_rrep(const Rrep& rrep, const Blacklist& blacklist,
                         const std::function<bool(NodeId)>& is_reliable);

struct FrpOutcome {
    Verdict verdict = Verdict::Continue;
    std::vector<NodeId> blackholes;
    std::string reason;
};

/// Applies one FRp to the session.
///
/// With a reliable responder the current IN is tested: it is a black hole if
/// it claimed to have routed data through the responder while the responder
/// reports never having received data from it. With an unreliable responder
/// the responder becomes the new IN and the session advances (Continue), or
/// gives up once the hop budget is spent.
FrpOutcome evaluate_frp(CrossCheckSession& session, const Frp& frp,
                        const std::function<bool(NodeId)>& is_reliable);

/// The chain of suspects from the RREP generator up to the current IN.
std::vector<NodeId> mark_blackholes(const CrossCheckSession& session);

/// Honest answer to an FRq from the responder's own tables.
Frp answer_frq(NodeId responder, const Frq& frq, const DriTable& dri,
               std::optional<NodeId> next_hop_to_destination);

}  // namespace bhsim
