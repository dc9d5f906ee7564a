#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "cclab/sim_time.hpp"

namespace cclab {

/// Handle returned by EventQueue::schedule; permits cancellation.
struct EventHandle {
    std::uint64_t seq = 0;
    bool valid() const { return seq != 0; }
};

/// Deterministic discrete-event core.
///
/// Events are ordered by (fire_at, seq) where seq is the insertion counter, so
/// simultaneous events fire in the order they were scheduled. Single-threaded.
class EventQueue {
public:
    using Action = std::function<void()>;
    /// Called before each event executes with (fire_at, seq).
    using Observer = std::function<void(SimTime, std::uint64_t)>;

    SimTime now() const { return now_; }

    /// Throws std::logic_error if `at` is earlier than the current clock.
    EventHandle schedule(SimTime at, Action action);
    EventHandle schedule_in(SimTime delay, Action action) { return schedule(now_ + delay, std::move(action)); }

    /// Returns false if the event already fired or was cancelled.
    bool cancel(EventHandle handle);
    bool pending(EventHandle handle) const { return actions_.contains(handle.seq); }

    /// Processes every event with fire_at <= t_end; returns how many ran.
    std::uint64_t run_until(SimTime t_end);
    /// Runs until the queue drains.
    std::uint64_t run();

    bool empty() const { return actions_.empty(); }
    std::size_t size() const { return actions_.size(); }

    void set_observer(Observer obs) { observer_ = std::move(obs); }

private:
    struct Entry {
        SimTime at;
        std::uint64_t seq;
        bool operator>(const Entry& o) const { return at != o.at ? at > o.at : seq > o.seq; }
    };

    bool step(SimTime limit);

    SimTime now_;
    std::uint64_t next_seq_ = 1;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
    std::unordered_map<std::uint64_t, Action> actions_;
    Observer observer_;
};

}  // namespace cclab
