#include "bhsim/cross_check.hpp"

#include <algorithm>

namespace bhsim {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::SecureRoute: return "SecureRoute";
        case Verdict::BlackholesFound: return "BlackholesFound";
        case Verdict::Continue: return "Continue";
        case Verdict::InsecureUnverifiable: return "InsecureUnverifiable";
    }
    return "?";
}

bool CrossCheckSession::is_suspect(NodeId n) const {
    return std::find(suspects.begin(), suspects.end(), n) != suspects.end();
}

CrossCheckSession open_session(std::uint32_t session_id, NodeId origin, const Rrep& rrep,
                               NodeId prev_hop, int hop_budget, SimTime now) {
    CrossCheckSession s;
    s.session_id = session_id;
    s.origin = origin;
    s.destination = rrep.destination;
    s.rrep_generator = rrep.responder;
    s.current_in = rrep.responder;
    s.current_in_claimed_dri = rrep.responder_dri_for_next_hop;
    s.current_nhn = rrep.responder_next_hop;
    s.suspects = {rrep.responder};
    s.hop_budget = hop_budget;
    s.rrep = rrep;
    s.rrep_prev_hop = prev_hop;
    s.started = now;
    return s;
}

RrepAction classify_rrep(const Rrep& rrep, const Blacklist& blacklist,
                         const std::function<bool(NodeId)>& is_reliable) {
    if (blacklist.contains(rrep.responder)) return RrepAction::Ignore;
    if (rrep.responder == rrep.destination || is_reliable(rrep.responder)) {
        return RrepAction::SecureRoute;
    }
    return RrepAction::StartCrossCheck;
}

FrpOutcome evaluate_frp(CrossCheckSession& session, const Frp& frp,
                        const std::function<bool(NodeId)>& is_reliable) {
    if (frp.session_id != session.session_id) throw SimError("FRp for a different session");
    if (!session.current_nhn || frp.responder != *session.current_nhn) {
        throw SimError("FRp from a node that was not asked");
    }

    if (is_reliable(frp.responder)) {
        const bool claimed_through = session.current_in_claimed_dri.has_value() &&
                                     session.current_in_claimed_dri->through;
        if (claimed_through && !frp.dri_for_in.from) {
            return {Verdict::BlackholesFound, mark_blackholes(session),
                    "reliable node " + std::to_string(frp.responder) + " contradicts " +
                        std::to_string(session.current_in)};
        }
        return {Verdict::SecureRoute, {}, "vouched by reliable node " + std::to_string(frp.responder)};
    }

    session.suspects.push_back(frp.responder);
    session.current_in = frp.responder;
    session.current_in_claimed_dri = frp.dri_for_responder_next_hop;
    session.current_nhn = frp.responder_next_hop;
    --session.hop_budget;
    if (session.hop_budget <= 0) return {Verdict::InsecureUnverifiable, {}, "hop budget exhausted"};
    return {Verdict::Continue, {}, {}};
}

std::vector<NodeId> mark_blackholes(const CrossCheckSession& session) {
    auto end = std::find(session.suspects.begin(), session.suspects.end(), session.current_in);
    if (end != session.suspects.end()) ++end;
    return {session.suspects.begin(), end};
}

Frp answer_frq(NodeId responder, const Frq& frq, const DriTable& dri,
               std::optional<NodeId> next_hop_to_destination) {
    Frp frp;
    frp.session_id = frq.session_id;
    frp.responder = responder;
    frp.dri_for_in = dri.reported(frq.queried_in);
    if (next_hop_to_destination) {
        frp.responder_next_hop = *next_hop_to_destination;
        frp.dri_for_responder_next_hop = dri.reported(*next_hop_to_destination);
    }
    frp.path.assign(frq.path.rbegin(), frq.path.rend());
    return frp;
}

}  // namespace bhsim
