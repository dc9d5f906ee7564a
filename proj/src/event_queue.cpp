#include "cclab/event_queue.hpp"

#include <stdexcept>
#include <string>

namespace cclab {

EventHandle EventQueue::schedule(SimTime at, Action action) {
    if (at < now_)
        throw std::logic_error("EventQueue: scheduling at " + std::to_string(at.us()) + "us before clock " +
                               std::to_string(now_.us()) + "us");
    const std::uint64_t seq = next_seq_++;
    heap_.push({at, seq});
    actions_.emplace(seq, std::move(action));
    return {seq};
}

bool EventQueue::cancel(EventHandle handle) { return actions_.erase(handle.seq) > 0; }

bool EventQueue::step(SimTime limit) {
    while (!heap_.empty()) {
        const Entry top = heap_.top();
        if (top.at > limit) return false;
        heap_.pop();
        auto it = actions_.find(top.seq);
        if (it == actions_.end()) continue;  // cancelled
        Action action = std::move(it->second);
        actions_.erase(it);
        now_ = top.at;
        if (observer_) observer_(top.at, top.seq);
        action();
        return true;
    }
    return false;
}

std::uint64_t EventQueue::run_until(SimTime t_end) {
    std::uint64_t count = 0;
    while (step(t_end)) ++count;
    if (now_ < t_end) now_ = t_end;
    return count;
}

std::uint64_t EventQueue::run() {
    std::uint64_t count = 0;
    while (step(SimTime::max())) ++count;
    return count;
}

}  // namespace cclab
