#include "bhsim/messages.hpp"

#include <sstream>

namespace bhsim {

const char* to_string(MessageType t) {
    switch (t) {
        case MessageType::Rreq: return "RREQ";
        case MessageType::Rrep: return "RREP";
        case MessageType::Rerr: return "RERR";
        case MessageType::Frq: return "FRQ";
        case MessageType::Frp: return "FRP";
        case MessageType::Data: return "DATA";
        case MessageType::Alarm: return "ALARM";
    }
    return "?";
}

namespace {

void list(std::ostream& out, const std::vector<NodeId>& ids) {
    out << '[';
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
    out << ']';
}

struct Summarizer {
    std::ostream& out;

    void operator()(const Rreq& m) {
        out << "origin=" << m.origin << " id=" << m.rreq_id << " dst=" << m.destination
            << " dseq=" << m.dest_seq_known << " hops=" << m.hop_count;
        if (!m.excluded.empty()) {
            out << " excl=";
            list(out, m.excluded);
        }
        if (m.probe_session != 0) out << " probe=" << m.probe_session;
    }
    void operator()(const Rrep& m) {
        out << "dst=" << m.destination << " dseq=" << m.dest_seq << " hops=" << m.hop_count
            << " origin=" << m.origin << " responder=" << m.responder;
        if (m.responder_next_hop) out << " nhn=" << *m.responder_next_hop;
        if (m.responder_dri_for_next_hop) out << " dri=" << to_string(*m.responder_dri_for_next_hop);
        if (m.probe_session != 0) out << " probe=" << m.probe_session;
    }
    void operator()(const Rerr& m) {
        out << "unreachable=";
        for (std::size_t i = 0; i < m.unreachable.size(); ++i) {
            out << (i ? "," : "") << m.unreachable[i].first << ':' << m.unreachable[i].second;
        }
    }
    void operator()(const Frq& m) {
        out << "session=" << m.origin << '/' << m.session_id << " target=" << m.target
            << " in=" << m.queried_in << " path=";
        list(out, m.path);
    }
    void operator()(const Frp& m) {
        out << "session=" << m.session_id << " responder=" << m.responder
            << " dri_in=" << to_string(m.dri_for_in);
        if (m.responder_next_hop) out << " nhn=" << *m.responder_next_hop;
        if (m.dri_for_responder_next_hop) out << " dri_nhn=" << to_string(*m.dri_for_responder_next_hop);
    }
    void operator()(const DataPacket& m) {
        out << "flow=" << m.flow_id << " seq=" << m.seq << " src=" << m.origin
            << " dst=" << m.destination;
    }
    void operator()(const Alarm& m) {
        out << "reporter=" << m.reporter << " id=" << m.alarm_id << " ids=";
        list(out, m.blackholes);
    }
};

}  // namespace

std::string summarize(const Message& m) {
    std::ostringstream out;
    std::visit(Summarizer{out}, m);
    return out.str();
}

}  // namespace bhsim
