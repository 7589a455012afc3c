#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "bhsim/types.hpp"

namespace bhsim {

enum class EventKind : std::uint8_t { Deliver, MobilityTick, TrafficTick, Timer };

const char* to_string(EventKind kind);

using EventId = std::uint64_t;

/// Discrete-event scheduler.
///
/// Events execute in non-decreasing time order; events scheduled for the same
/// instant run in insertion order. Every event fires exactly once unless it
/// is cancelled first.
class Engine {
public:
    using Action = std::function<void()>;

    /// Throws ConfigError if `time` lies before now().
    EventId schedule(SimTime time, EventKind kind, NodeId node, Action action);

    EventId schedule_in(SimTime delay, EventKind kind, NodeId node, Action action) {
        return schedule(now_ + delay, kind, node, std::move(action));
    }

    /// Returns false if the event already fired, was cancelled, or never existed.
    bool cancel(EventId id);

    /// Processes every event with time <= t_end, then sets the clock to t_end.
    void run_until(SimTime t_end);

    SimTime now() const { return now_; }
    std::size_t pending() const { return queue_.size() - cancelled_.size(); }
    std::uint64_t fired() const { return fired_; }

    /// Called before each event's action runs.
    void set_observer(std::function<void(SimTime, EventKind, NodeId)> observer) {
        observer_ = std::move(observer);
    }

private:
    struct Event {
        SimTime time;
        EventId id;
        EventKind kind;
        NodeId node;
        Action action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.id > b.id;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::unordered_set<EventId> live_;
    std::unordered_set<EventId> cancelled_;
    SimTime now_ = 0.0;
    EventId next_id_ = 1;  // 0 is never issued, so callers may use it as "no event"
    std::uint64_t fired_ = 0;
    std::function<void(SimTime, EventKind, NodeId)> observer_;
};

}  // namespace bhsim
