#include "cclab/link.hpp"

#include <stdexcept>
#include <string>

namespace cclab {

void LinkConfig::validate() const {
    if (rate_bps == 0) throw std::invalid_argument("link.rate_bps must be > 0");
    if (queue_capacity < 1) throw std::invalid_argument("link.queue_packets must be >= 1");
    if (!(arq_frame_error_prob >= 0.0 && arq_frame_error_prob < 1.0))
        throw std::invalid_argument("link.arq_frame_error_prob must be in [0,1)");
    if (!(residual_loss_prob >= 0.0 && residual_loss_prob < 1.0))
        throw std::invalid_argument("link.residual_loss_prob must be in [0,1)");
}

SimTime LinkConfig::serialization_time(std::uint64_t wire_bytes) const {
    const unsigned __int128 num = static_cast<unsigned __int128>(wire_bytes) * 8u * 1'000'000u + rate_bps / 2;
    return SimTime::from_us(static_cast<SimTime::rep>(num / rate_bps));
}

DropTailQueue::DropTailQueue(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw std::invalid_argument("DropTailQueue: capacity must be >= 1");
}

EnqueueResult DropTailQueue::enqueue(const Packet& p) {
    if (backlog_.size() >= capacity_) return EnqueueResult::Dropped;
    backlog_.push_back(p);
    backlog_bytes_ += p.wire_bytes;
    return EnqueueResult::Accepted;
}

Packet DropTailQueue::pop() {
    Packet p = backlog_.front();
    backlog_.pop_front();
    backlog_bytes_ -= p.wire_bytes;
    return p;
}

ArqModel::ArqModel(double frame_error_prob, SimTime retx_delay, unsigned max_retx, double residual_loss_prob)
    : p_(frame_error_prob), retx_delay_(retx_delay), max_retx_(max_retx), residual_(residual_loss_prob) {
    // A certain frame error is legal here (the capped model still terminates);
    // LinkConfig is stricter.
    if (!(p_ >= 0.0 && p_ <= 1.0)) throw std::invalid_argument("ArqModel: frame error probability must be in [0,1]");
    if (!(residual_ >= 0.0 && residual_ < 1.0)) throw std::invalid_argument("ArqModel: residual loss must be in [0,1)");
}

ArqModel::Outcome ArqModel::draw(Rng& rng) const {
    Outcome out;
    if (p_ <= 0.0) return out;
    while (out.retransmissions < max_retx_ && rng.bernoulli(p_)) ++out.retransmissions;
    out.penalty = retx_delay_ * out.retransmissions;
    if (residual_ > 0.0 && max_retx_ > 0 && out.retransmissions == max_retx_) out.lost = rng.bernoulli(residual_);
    return out;
}

double ArqModel::expected_uncapped_penalty_us() const {
    return static_cast<double>(retx_delay_.us()) * p_ / (1.0 - p_);
}

BottleneckLink::BottleneckLink(EventQueue& events, LinkConfig config, std::uint64_t seed)
    : events_(events),
      config_((config.validate(), config)),
      rng_(seed),
      arq_(config_.arq_frame_error_prob, config_.arq_retx_delay, config_.arq_max_retx, config_.residual_loss_prob),
      queue_(config_.queue_capacity) {}

EnqueueResult BottleneckLink::send(Packet p) {
    if (p.wire_bytes == 0) throw std::invalid_argument("BottleneckLink: packet size must be > 0");
    p.id = next_id_++;
    auto& st = stats_[p.flow];
    ++st.arrivals;
    if (!busy_) {
        // An idle link takes the packet straight into service.
        ++st.accepted;
        in_service_ = p;
        start_service();
        return EnqueueResult::Accepted;
    }
    const EnqueueResult r = queue_.enqueue(p);
    if (r == EnqueueResult::Dropped) {
        ++st.queue_drops;
    } else {
        ++st.accepted;
        notify_backlog();
    }
    return r;
}

void BottleneckLink::start_service() {
    busy_ = true;
    const SimTime done = events_.now() + config_.serialization_time(in_service_.wire_bytes);
    events_.schedule(done, [this] { finish_service(); });
}

void BottleneckLink::finish_service() {
    const Packet p = in_service_;
    const ArqModel::Outcome arq = arq_.draw(rng_);
    if (arq.lost) {
        ++stats_[p.flow].arq_losses;
    } else {
        SimTime at = events_.now() + SimTime::from_us(config_.prop_rtt.us() / 2) + arq.penalty;
        // ARQ stalls the head of line: nothing overtakes an earlier packet.
        if (at < last_delivery_) at = last_delivery_;
        last_delivery_ = at;
        events_.schedule(at, [this, p] {
            ++stats_[p.flow].delivered;
            if (deliver_) deliver_(p);
        });
    }
    if (queue_.empty()) {
        busy_ = false;
        return;
    }
    in_service_ = queue_.pop();
    notify_backlog();
    start_service();
}

void BottleneckLink::notify_backlog() {
    if (backlog_observer_) backlog_observer_(events_.now(), queue_.size());
}

LinkFlowStats BottleneckLink::total_stats() const {
    LinkFlowStats t;
    for (const auto& [id, s] : stats_) {
        t.arrivals += s.arrivals;
        t.accepted += s.accepted;
        t.queue_drops += s.queue_drops;
        t.arq_losses += s.arq_losses;
        t.delivered += s.delivered;
    }
    return t;
}

}  // namespace cclab
