#include "bhsim/engine.hpp"

#include <string>

namespace bhsim {

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Deliver: return "DELIVER";
        case EventKind::MobilityTick: return "MOBILITY";
        case EventKind::TrafficTick: return "TRAFFIC";
        case EventKind::Timer: return "TIMER";
    }
    return "?";
}

EventId Engine::schedule(SimTime time, EventKind kind, NodeId node, Action action) {
    if (time < now_) {
        throw ConfigError("event scheduled in the past: t=" + std::to_string(time) +
                          " now=" + std::to_string(now_));
    }
    const EventId id = next_id_++;
    queue_.push(Event{time, id, kind, node, std::move(action)});
    live_.insert(id);
    return id;
}

bool Engine::cancel(EventId id) {
    if (live_.erase(id) == 0) return false;
    cancelled_.insert(id);
    return true;
}

void Engine::run_until(SimTime t_end) {
    while (!queue_.empty() && queue_.top().time <= t_end) {
        // priority_queue::top is const; the action is moved out before pop.
        Event ev = std::move(const_cast<Event&>(queue_.top()));
        queue_.pop();
        if (cancelled_.erase(ev.id) != 0) continue;
        live_.erase(ev.id);
        now_ = ev.time;
        ++fired_;
        if (observer_) observer_(ev.time, ev.kind, ev.node);
        ev.action();
    }
    if (t_end > now_) now_ = t_end;
}

}  // namespace bhsim
