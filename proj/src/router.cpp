#include "bhsim/router.hpp"

#include <algorithm>
#include <sstream>

namespace bhsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool contains(const std::vector<NodeId>& ids, NodeId n) {
    return std::find(ids.begin(), ids.end(), n) != ids.end();
}

}  // namespace

void ProtocolParams::validate() const {
    if (!(route_lifetime > 0.0)) throw ConfigError("route_lifetime must be > 0");
    if (!(discovery_timeout > 0.0)) throw ConfigError("discovery_timeout must be > 0");
    if (discovery_retries < 0) throw ConfigError("discovery_retries must be >= 0");
    if (buffer_cap == 0) throw ConfigError("buffer_cap must be >= 1");
    if (!(frp_timeout > 0.0)) throw ConfigError("frp_timeout must be > 0");
    if (hop_budget < 1) throw ConfigError("hop_budget must be >= 1");
    if (data_ttl == 0) throw ConfigError("data_ttl must be >= 1");
}

const char* to_string(DropReason r) {
    switch (r) {
        case DropReason::Attacker: return "attacker";
        case DropReason::Overflow: return "overflow";
        case DropReason::NoRoute: return "no-route";
        case DropReason::Ttl: return "ttl";
    }
    return "?";
}

std::string format_record(const SessionRecord& r) {
    std::ostringstream out;
    char t[32];
    std::snprintf(t, sizeof t, "%.6f", r.time);
    out << "t=" << t << " origin=" << r.origin << " session=" << r.session_id
        << " dst=" << r.destination << " chain=";
    for (std::size_t i = 0; i < r.chain.size(); ++i) out << (i ? ">" : "") << r.chain[i];
    out << " verdict=" << to_string(r.verdict);
    if (!r.blackholes.empty()) {
        out << " blackholes=";
        for (std::size_t i = 0; i < r.blackholes.size(); ++i) out << (i ? "," : "") << r.blackholes[i];
    }
    if (!r.reason.empty()) out << " reason=\"" << r.reason << '"';
    return out.str();
}

Router::Router(NodeId id, Host& host, ProtocolParams params)
    : host_(host), id_(id), params_(params), routes_(id), dri_(id) {
    params_.validate();
}

void Router::receive(const Message& msg, NodeId prev_hop) {
    std::visit(Overloaded{
                   [&](const Rreq& m) { handle_rreq(m, prev_hop); },
                   [&](const Rrep& m) { handle_rrep(m, prev_hop); },
                   [&](const Rerr& m) { handle_rerr(m, prev_hop); },
                   [&](const Frq& m) { handle_frq(m, prev_hop); },
                   [&](const Frp& m) { handle_frp(m, prev_hop); },
                   [&](const DataPacket& m) { handle_data(m, prev_hop); },
                   [&](const Alarm& m) { handle_alarm(m, prev_hop); },
               },
               msg);
}

std::size_t Router::buffered() const {
    std::size_t n = 0;
    for (const auto& [flow, q] : buffers_) n += q.size();
    return n;
}

bool Router::is_reliable(NodeId candidate) const {
    return dri_.through(candidate) || reliable_hints_.count(candidate) != 0;
}

void Router::update_dri_secure(NodeId in_node) { dri_.mark_through(in_node); }

std::optional<NodeId> Router::next_hop_toward(NodeId dest) const {
    if (dest == id_) return std::nullopt;
    const RouteEntry* r = routes_.lookup(dest, host_.now());
    if (r == nullptr) return std::nullopt;
    return r->next_hop;
}

// ---------------------------------------------------------------------------
// Data plane

void Router::originate_data(DataPacket pkt) {
    pkt.hop_trace = {id_};
    route_data(std::move(pkt));
}

void Router::handle_data(DataPacket pkt, NodeId prev_hop) {
    pkt.hop_trace.push_back(id_);
    dri_.record_from(prev_hop);
    if (pkt.destination == id_) {
        host_.data_delivered(id_, pkt);
        return;
    }
    if (pkt.ttl <= 1) {
        host_.data_dropped(id_, pkt, DropReason::Ttl);
        return;
    }
    --pkt.ttl;
    route_data(std::move(pkt));
}

const RouteEntry* Router::data_route(NodeId dest, bool own) const {
    const RouteEntry* r = routes_.lookup(dest, host_.now());
    if (r == nullptr) return nullptr;
    if (params_.defense) {
        if (blacklist_.contains(r->next_hop)) return nullptr;
        // Traffic this node originates only follows routes its own
        // discovery has vetted.
        if (own && !r->secured) return nullptr;
    }
    return r;
}

void Router::route_data(DataPacket pkt) {
    const NodeId dest = pkt.destination;
    const RouteEntry* r = data_route(dest, pkt.origin == id_);
    if (r == nullptr) {
        buffer_packet(std::move(pkt));
        originate_discovery(dest);
        return;
    }
    const NodeId next = r->next_hop;
    if (host_.unicast(id_, next, pkt) == LinkStatus::Delivered) {
        dri_.record_through(next);
        routes_.refresh(dest, host_.now() + params_.route_lifetime);
        return;
    }
    handle_link_break(next);
    buffer_packet(std::move(pkt));
    originate_discovery(dest);
}

void Router::buffer_packet(DataPacket pkt) {
    auto& q = buffers_[pkt.flow_id];
    if (q.size() >= params_.buffer_cap) {
        host_.data_dropped(id_, q.front(), DropReason::Overflow);
        q.pop_front();
    }
    q.push_back(std::move(pkt));
}

void Router::handle_link_break(NodeId next_hop) {
    auto broken = routes_.invalidate_via(next_hop, host_.now());
    if (broken.empty()) return;
    host_.broadcast(id_, Rerr{std::move(broken)});
}

// ---------------------------------------------------------------------------
// Route discovery

void Router::originate_discovery(NodeId destination) {
    if (destination == id_ || pending_.count(destination) != 0) return;
    pending_.emplace(destination, Discovery{});
    send_rreq(destination);
}

void Router::send_rreq(NodeId dest) {
    ++own_seq_;
    Rreq rreq;
    rreq.origin = id_;
    rreq.origin_seq = own_seq_;
    rreq.rreq_id = ++next_rreq_id_;
    rreq.destination = dest;
    if (const RouteEntry* known = routes_.find(dest)) {
        rreq.dest_seq_known = known->dest_seq;
        // A usable but unvetted route can only be displaced by fresher news.
        if (params_.defense && known->usable(host_.now()) && !known->secured) ++rreq.dest_seq_known;
    }
    seen_rreqs_.emplace(id_, rreq.rreq_id);
    host_.broadcast(id_, rreq);
    Discovery& d = pending_[dest];
    const double wait = params_.discovery_timeout * std::max(1, d.attempts);
    d.timer = host_.set_timer(id_, wait, "discovery-timeout",
                              [this, dest] { on_discovery_timeout(dest); });
}

void Router::on_discovery_timeout(NodeId dest) {
    auto it = pending_.find(dest);
    if (it == pending_.end()) return;
    if (it->second.attempts < params_.discovery_retries) {
        ++it->second.attempts;
        send_rreq(dest);
        return;
    }
    pending_.erase(it);
    for (auto q = buffers_.begin(); q != buffers_.end();) {
        if (!q->second.empty() && q->second.front().destination == dest) {
            for (const DataPacket& p : q->second) host_.data_dropped(id_, p, DropReason::NoRoute);
            q = buffers_.erase(q);
        } else {
            ++q;
        }
    }
}

void Router::complete_discovery(NodeId dest) {
    if (auto it = pending_.find(dest); it != pending_.end()) {
        host_.cancel_timer(it->second.timer);
        pending_.erase(it);
    }
    std::vector<DataPacket> ready;
    for (auto q = buffers_.begin(); q != buffers_.end();) {
        if (!q->second.empty() && q->second.front().destination == dest) {
            std::move(q->second.begin(), q->second.end(), std::back_inserter(ready));
            q = buffers_.erase(q);
        } else {
            ++q;
        }
    }
    for (DataPacket& p : ready) route_data(std::move(p));
}

bool Router::first_sighting(const Rreq& rreq) {
    return seen_rreqs_.emplace(rreq.origin, rreq.rreq_id).second;
}

void Router::reply_as_destination(const Rreq& rreq, NodeId prev_hop) {
    own_seq_ = std::max(own_seq_, rreq.dest_seq_known);
    Rrep rrep;
    rrep.destination = id_;
    rrep.dest_seq = own_seq_;
    rrep.hop_count = 0;
    rrep.origin = rreq.origin;
    rrep.responder = id_;
    rrep.probe_session = rreq.probe_session;
    rrep.trace = {id_};
    if (host_.unicast(id_, prev_hop, rrep) == LinkStatus::LinkBroken) handle_link_break(prev_hop);
}

void Router::handle_rreq(const Rreq& rreq, NodeId prev_hop) {
    if (rreq.origin == id_) return;
    if (params_.defense && (blacklist_.contains(prev_hop) || blacklist_.contains(rreq.origin))) return;
    if (!first_sighting(rreq)) return;
    if (contains(rreq.excluded, id_)) return;

    const SimTime now = host_.now();
    RouteEntry reverse;
    reverse.destination = rreq.origin;
    reverse.next_hop = prev_hop;
    reverse.hop_count = rreq.hop_count + 1;
    reverse.dest_seq = rreq.origin_seq;
    reverse.lifetime_expiry = now + params_.route_lifetime;
    reverse.valid = true;
    routes_.update(reverse, now);

    if (rreq.destination == id_) {
        reply_as_destination(rreq, prev_hop);
        return;
    }

    // Probes and requests with exclusions are answered by the destination
    // only, so the discovered path never runs through an excluded node.
    if (rreq.probe_session == 0 && rreq.excluded.empty()) {
        const RouteEntry* r = routes_.lookup(rreq.destination, now);
        if (r != nullptr && r->dest_seq >= rreq.dest_seq_known && r->next_hop != prev_hop &&
            !(params_.defense && blacklist_.contains(r->next_hop))) {
            Rrep rrep;
            rrep.destination = rreq.destination;
            rrep.dest_seq = r->dest_seq;
            rrep.hop_count = r->hop_count;
            rrep.origin = rreq.origin;
            rrep.responder = id_;
            if (params_.defense) {
                rrep.responder_next_hop = r->next_hop;
                rrep.responder_dri_for_next_hop = dri_.reported(r->next_hop);
            }
            rrep.trace = {id_};
            rrep.tainted = r->tainted;
            if (host_.unicast(id_, prev_hop, rrep) == LinkStatus::LinkBroken) {
                handle_link_break(prev_hop);
            }
            return;
        }
    }

    Rreq fwd = rreq;
    ++fwd.hop_count;
    host_.broadcast(id_, fwd);
}

RouteEntry Router::forward_entry(const Rrep& rrep, NodeId prev_hop) const {
    RouteEntry e;
    e.destination = rrep.destination;
    e.next_hop = prev_hop;
    e.hop_count = rrep.hop_count + 1;
    e.dest_seq = rrep.dest_seq;
    e.lifetime_expiry = host_.now() + params_.route_lifetime;
    e.valid = true;
    e.tainted = rrep.tainted;
    return e;
}

void Router::handle_rrep(const Rrep& rrep, NodeId prev_hop) {
    if (params_.defense && (blacklist_.contains(prev_hop) || blacklist_.contains(rrep.responder))) {
        return;
    }
    const SimTime now = host_.now();

    if (rrep.origin != id_) {
        routes_.update(forward_entry(rrep, prev_hop), now);
        const RouteEntry* back = routes_.lookup(rrep.origin, now);
        if (back == nullptr) return;
        Rrep fwd = rrep;
        ++fwd.hop_count;
        fwd.trace.push_back(id_);
        const NodeId next = back->next_hop;
        if (host_.unicast(id_, next, fwd) == LinkStatus::LinkBroken) {
            handle_link_break(next);
        } else {
            routes_.refresh(rrep.origin, now + params_.route_lifetime);
        }
        return;
    }

    if (rrep.probe_session != 0) {
        on_probe_reply(rrep, prev_hop);
        return;
    }
    if (!params_.defense) {
        // First response wins; later replies only replace it if preferred.
        routes_.update(forward_entry(rrep, prev_hop), now);
        if (routes_.lookup(rrep.destination, now) != nullptr) complete_discovery(rrep.destination);
        return;
    }
    on_rrep_received(rrep, prev_hop);
}

void Router::handle_rerr(const Rerr& rerr, NodeId prev_hop) {
    const SimTime now = host_.now();
    std::vector<std::pair<NodeId, SeqNum>> lost;
    for (const auto& [dest, seq] : rerr.unreachable) {
        if (routes_.invalidate_if(dest, prev_hop, seq, now)) lost.emplace_back(dest, seq);
    }
    if (!lost.empty()) host_.broadcast(id_, Rerr{std::move(lost)});
}

// ---------------------------------------------------------------------------
// Cross-checking

void Router::on_rrep_received(const Rrep& rrep, NodeId prev_hop) {
    const NodeId dest = rrep.destination;
    const RouteEntry* current = routes_.lookup(dest, host_.now());
    if (current != nullptr && current->secured) return;  // an earlier reply already passed
    switch (classify_rrep(rrep, blacklist_, [this](NodeId n) { return is_reliable(n); })) {
        case RrepAction::Ignore:
            return;
        case RrepAction::SecureRoute:
            accept_route(rrep, prev_hop);
            return;
        case RrepAction::StartCrossCheck:
            break;
    }
    for (const auto& [sid, s] : sessions_) {
        if (s.rrep_generator == rrep.responder && s.destination == dest) return;
    }
    const std::uint32_t sid = ++next_session_id_;
    sessions_.emplace(sid, open_session(sid, id_, rrep, prev_hop, params_.hop_budget, host_.now()));
    send_frq(sid);
}

void Router::accept_route(const Rrep& rrep, NodeId prev_hop) {
    const SimTime now = host_.now();
    const RouteEntry* current = routes_.find(rrep.destination);
    RouteEntry e = forward_entry(rrep, prev_hop);
    e.secured = true;
    bool take = false;
    if (current == nullptr) {
        take = true;
    } else if (!current->usable(now)) {
        take = e.dest_seq >= current->dest_seq;
    } else if (!current->secured) {
        // Same freshness rule as any other update, so a vetted reply never
        // replaces a better route this node is already relaying on.
        take = e.dest_seq > current->dest_seq ||
               (e.dest_seq == current->dest_seq && e.hop_count <= current->hop_count);
    }
    if (take) routes_.install(e);
    const RouteEntry* now_route = routes_.lookup(rrep.destination, now);
    if (now_route != nullptr && now_route->secured) complete_discovery(rrep.destination);
}

void Router::send_frq(std::uint32_t session_id) {
    CrossCheckSession& s = sessions_.at(session_id);
    if (!s.current_nhn) {
        close_session(session_id, Verdict::InsecureUnverifiable, "no next hop to ask");
        return;
    }
    const NodeId nhn = *s.current_nhn;
    if (nhn == id_ || s.is_suspect(nhn)) {
        close_session(session_id, Verdict::InsecureUnverifiable, "claimed chain loops");
        return;
    }

    // Find a path to the next hop node that avoids every suspect.
    ++own_seq_;
    Rreq probe;
    probe.origin = id_;
    probe.origin_seq = own_seq_;
    probe.rreq_id = ++next_rreq_id_;
    probe.destination = nhn;
    probe.excluded = s.suspects;
    probe.probe_session = session_id;
    seen_rreqs_.emplace(id_, probe.rreq_id);
    s.phase = CrossCheckSession::Phase::Probing;
    host_.cancel_timer(s.timer);
    s.timer = host_.set_timer(id_, params_.frp_timeout, "frp-timeout",
                              [this, session_id] { on_session_timeout(session_id); });
    host_.broadcast(id_, probe);
}

void Router::on_probe_reply(const Rrep& rrep, NodeId prev_hop) {
    auto it = sessions_.find(rrep.probe_session);
    if (it == sessions_.end()) return;
    CrossCheckSession& s = it->second;
    if (s.phase != CrossCheckSession::Phase::Probing || !s.current_nhn ||
        rrep.responder != *s.current_nhn || rrep.destination != rrep.responder) {
        return;
    }
    Frq frq;
    frq.origin = id_;
    frq.target = *s.current_nhn;
    frq.queried_in = s.current_in;
    frq.destination = s.destination;
    frq.session_id = s.session_id;
    frq.path.push_back(id_);
    frq.path.insert(frq.path.end(), rrep.trace.rbegin(), rrep.trace.rend());
    if (frq.path.size() < 2 || frq.path[1] != prev_hop) return;
    s.phase = CrossCheckSession::Phase::AwaitingFrp;
    send_source_routed(frq.path, frq);
}

void Router::handle_frq(const Frq& frq, NodeId /*prev_hop*/) {
    if (frq.target != id_) {
        relay_along(frq.path, frq);
        return;
    }
    if (params_.defense && blacklist_.contains(frq.origin)) return;
    Frp frp = answer_frq(id_, frq, dri_, next_hop_toward(frq.destination));
    send_source_routed(frp.path, frp);
}

void Router::handle_frp(const Frp& frp, NodeId /*prev_hop*/) {
    if (frp.path.empty() || frp.path.back() != id_) {
        relay_along(frp.path, frp);
        return;
    }
    if (blacklist_.contains(frp.responder)) return;
    auto it = sessions_.find(frp.session_id);
    if (it == sessions_.end()) return;
    CrossCheckSession& s = it->second;
    if (s.phase != CrossCheckSession::Phase::AwaitingFrp || !s.current_nhn ||
        frp.responder != *s.current_nhn) {
        return;
    }
    host_.cancel_timer(s.timer);

    FrpOutcome outcome = evaluate_frp(s, frp, [this](NodeId n) { return is_reliable(n); });
    switch (outcome.verdict) {
        case Verdict::Continue:
            send_frq(frp.session_id);
            return;
        case Verdict::InsecureUnverifiable:
            close_session(frp.session_id, outcome.verdict, std::move(outcome.reason));
            return;
        case Verdict::BlackholesFound: {
            std::vector<NodeId> found = outcome.blackholes;
            close_session(frp.session_id, outcome.verdict, std::move(outcome.reason), found);
            blacklist_nodes(found);
            broadcast_alarm(found);
            return;
        }
        case Verdict::SecureRoute: {
            const Rrep rrep = s.rrep;
            const NodeId prev = s.rrep_prev_hop;
            update_dri_secure(s.current_in);
            // The check is done once per responder: later replies from the
            // generator take the reliable fast path.
            update_dri_secure(s.rrep_generator);
            if (params_.dri_sharing && frp.responder_next_hop && frp.dri_for_responder_next_hop &&
                frp.dri_for_responder_next_hop->through) {
                reliable_hints_.insert(*frp.responder_next_hop);
            }
            close_session(frp.session_id, outcome.verdict, std::move(outcome.reason));
            accept_route(rrep, prev);
            return;
        }
    }
}

void Router::on_session_timeout(std::uint32_t session_id) {
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return;
    it->second.timer = 0;
    close_session(session_id, Verdict::InsecureUnverifiable,
                  it->second.phase == CrossCheckSession::Phase::Probing
                      ? "no path avoiding suspects"
                      : "FRp timeout");
}

void Router::close_session(std::uint32_t session_id, Verdict verdict, std::string reason,
                           std::vector<NodeId> blackholes) {
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return;
    const CrossCheckSession& s = it->second;
    if (s.timer != 0) host_.cancel_timer(s.timer);
    SessionRecord rec;
    rec.time = host_.now();
    rec.origin = id_;
    rec.session_id = session_id;
    rec.destination = s.destination;
    rec.responder = s.rrep_generator;
    rec.chain = s.suspects;
    if (s.current_nhn && verdict != Verdict::BlackholesFound) rec.chain.push_back(*s.current_nhn);
    rec.verdict = verdict;
    rec.blackholes = std::move(blackholes);
    rec.reason = std::move(reason);
    sessions_.erase(it);
    host_.session_closed(rec);
}

void Router::send_source_routed(const std::vector<NodeId>& path, const Message& msg) {
    if (path.size() < 2) return;
    host_.unicast(id_, path[1], msg);
}

void Router::relay_along(const std::vector<NodeId>& path, const Message& msg) {
    auto it = std::find(path.begin(), path.end(), id_);
    if (it == path.end() || std::next(it) == path.end()) return;
    host_.unicast(id_, *std::next(it), msg);
}

// ---------------------------------------------------------------------------
// Alarms

void Router::blacklist_nodes(const std::vector<NodeId>& ids) {
    const SimTime now = host_.now();
    for (NodeId n : ids) {
        if (n == id_) continue;
        blacklist_.add(n, now);
        routes_.invalidate_via(n, now);
    }
    std::vector<std::uint32_t> doomed;
    for (const auto& [sid, s] : sessions_) {
        if (blacklist_.contains(s.rrep_generator)) doomed.push_back(sid);
    }
    for (std::uint32_t sid : doomed) {
        close_session(sid, Verdict::InsecureUnverifiable, "responder blacklisted");
    }
}

void Router::broadcast_alarm(const std::vector<NodeId>& ids) {
    if (ids.empty()) return;
    Alarm alarm{id_, ids, ++next_alarm_id_};
    seen_alarms_.emplace(alarm.reporter, alarm.alarm_id);
    host_.broadcast(id_, alarm);
}

void Router::handle_alarm(const Alarm& alarm, NodeId /*prev_hop*/) {
    if (alarm.reporter == id_) return;
    if (!seen_alarms_.emplace(alarm.reporter, alarm.alarm_id).second) return;
    if (!params_.defense || blacklist_.contains(alarm.reporter)) return;
    blacklist_nodes(alarm.blackholes);
    host_.broadcast(id_, alarm);
}

}  // namespace bhsim
