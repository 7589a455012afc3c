#include "bhsim/adversary.hpp"

#include <algorithm>

namespace bhsim {

BlackholeRouter::BlackholeRouter(NodeId id, Host& host, ProtocolParams params,
                                 AttackerConfig config, std::set<NodeId> coalition)
    : Router(id, host, params), config_(config), coalition_(std::move(coalition)) {
    coalition_.insert(id);
    if (config_.partner != kNoNode) coalition_.insert(config_.partner);
}

Rrep BlackholeRouter::forge_rrep(const Rreq& rreq) const {
    Rrep rrep;
    rrep.destination = rreq.destination;
    rrep.dest_seq = rreq.dest_seq_known + config_.fabricated_seq_boost;
    rrep.hop_count = 1;
    rrep.origin = rreq.origin;
    rrep.responder = id_;
    if (params_.defense && config_.partner != kNoNode) {
        rrep.responder_next_hop = config_.partner;
        rrep.responder_dri_for_next_hop = DriEntry{false, true};
    }
    rrep.probe_session = rreq.probe_session;
    rrep.trace = {id_};
    rrep.tainted = true;
    return rrep;
}

void BlackholeRouter::handle_rreq(const Rreq& rreq, NodeId prev_hop) {
    if (rreq.origin == id_) return;
    if (!first_sighting(rreq)) return;
    if (std::find(rreq.excluded.begin(), rreq.excluded.end(), id_) != rreq.excluded.end()) return;
    if (rreq.destination == id_) {
        reply_as_destination(rreq, prev_hop);
        return;
    }
    const Rrep rrep = forge_rrep(rreq);
    ++false_rreps_;
    host_.rrep_forged(id_, rrep);
    host_.unicast(id_, prev_hop, rrep);
}

// Replies, errors and alarms are swallowed: an attacker never relays
// control traffic it could be caught by.
void BlackholeRouter::handle_rrep(const Rrep&, NodeId) {}
void BlackholeRouter::handle_rerr(const Rerr&, NodeId) {}
void BlackholeRouter::handle_frp(const Frp&, NodeId) {}
void BlackholeRouter::handle_alarm(const Alarm&, NodeId) {}

Frp BlackholeRouter::collude_frp(const Frq& frq) {
    if (config_.role != AttackerRole::Colluder || frq.queried_in != config_.partner) {
        return answer_frq(id_, frq, dri_, next_hop_toward(frq.destination));
    }
    Frp frp;
    frp.session_id = frq.session_id;
    frp.responder = id_;
    frp.dri_for_in = DriEntry{true, true};
    NodeId named = frq.destination;
    if (config_.chain_next) {
        named = *config_.chain_next;
    } else {
        std::vector<NodeId> honest;
        for (NodeId n : host_.neighbors(id_)) {
            if (coalition_.count(n) == 0) honest.push_back(n);
        }
        if (!honest.empty()) named = honest[host_.behavior_rng().below(honest.size())];
    }
    frp.responder_next_hop = named;
    frp.dri_for_responder_next_hop = DriEntry{false, true};
    frp.path.assign(frq.path.rbegin(), frq.path.rend());
    return frp;
}

void BlackholeRouter::handle_frq(const Frq& frq, NodeId) {
    if (frq.target != id_) return;
    Frp frp = collude_frp(frq);
    send_source_routed(frp.path, frp);
}

void BlackholeRouter::handle_data(DataPacket pkt, NodeId prev_hop) {
    pkt.hop_trace.push_back(id_);
    dri_.record_from(prev_hop);
    if (pkt.destination == id_) {
        host_.data_delivered(id_, pkt);
        return;
    }
    ++dropped_;
    host_.data_dropped(id_, pkt, DropReason::Attacker);
}

}  // namespace bhsim
