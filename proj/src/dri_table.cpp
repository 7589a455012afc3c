#include "bhsim/dri_table.hpp"

#include <sstream>

namespace bhsim {

std::string to_string(DriEntry e) {
    return std::string{e.from ? '1' : '0', e.through ? '1' : '0'};
}

void DriTable::record_from(NodeId prev_hop) {
    if (prev_hop == owner_ || prev_hop == kNoNode) return;
    entries_[prev_hop].from = true;
}

void DriTable::record_through(NodeId next_hop) {
    if (next_hop == owner_ || next_hop == kNoNode) return;
    entries_[next_hop].through = true;
    routed_.insert(next_hop);
}

void DriTable::mark_through(NodeId node) {
    if (node == owner_ || node == kNoNode) return;
    entries_[node].through = true;
}

DriEntry DriTable::reported(NodeId node) const {
    DriEntry e = get(node);
    e.through = routed_.count(node) != 0;
    return e;
}

DriEntry DriTable::get(NodeId node) const {
    auto it = entries_.find(node);
    return it == entries_.end() ? DriEntry{} : it->second;
}

std::string DriTable::dump() const {
    std::ostringstream out;
    for (const auto& [node, e] : entries_) {
        out << node << ' ' << (e.from ? 1 : 0) << ' ' << (e.through ? 1 : 0) << '\n';
    }
    return out.str();
}

bool Blacklist::add(NodeId node, SimTime when) {
    if (!ids_.insert(node).second) return false;
    first_marked_.emplace(node, when);
    return true;
}

std::optional<SimTime> Blacklist::first_marked(NodeId node) const {
    auto it = first_marked_.find(node);
    if (it == first_marked_.end()) return std::nullopt;
    return it->second;
}

}  // namespace bhsim
