#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>

#include "cclab/event_queue.hpp"
#include "cclab/rng.hpp"
#include "cclab/sim_time.hpp"

namespace cclab {

using FlowId = std::uint32_t;

/// Bottleneck downlink parameters. The defaults form the desk-scale HSDPA-like
/// scenario: 1.5 Mbit/s, 100 ms base RTT, 60-packet buffer, delay-only ARQ.
struct LinkConfig {
    std::uint64_t rate_bps = 1'500'000;
    SimTime prop_rtt = SimTime::from_ms(100);
    std::size_t queue_capacity = 60;
    double arq_frame_error_prob = 0.1;
    SimTime arq_retx_delay = SimTime::from_ms(12);
    unsigned arq_max_retx = 3;
    double residual_loss_prob = 0.0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    SimTime serialization_time(std::uint64_t wire_bytes) const;
};

/// A data segment as it crosses the bottleneck.
struct Packet {
    FlowId flow = 0;
    std::uint64_t seq = 0;
    std::uint32_t payload = 0;
    std::uint32_t wire_bytes = 0;
    bool retransmission = false;
    std::uint64_t id = 0;  // unique per link, assigned on arrival
};

enum class EnqueueResult { Accepted, Dropped };

/// Finite FIFO that drops arrivals when full.
class DropTailQueue {
public:
    explicit DropTailQueue(std::size_t capacity);

    EnqueueResult enqueue(const Packet& p);
    const Packet& front() const { return backlog_.front(); }
    Packet pop();

    std::size_t size() const { return backlog_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return backlog_.empty(); }
    std::uint64_t backlog_bytes() const { return backlog_bytes_; }

private:
    std::deque<Packet> backlog_;
    std::size_t capacity_;
    std::uint64_t backlog_bytes_ = 0;
};

/// Link-layer ARQ: each frame error costs one retransmission delay.
class ArqModel {
public:
    struct Outcome {
        unsigned retransmissions = 0;
        SimTime penalty;
        bool lost = false;
    };

    ArqModel(double frame_error_prob, SimTime retx_delay, unsigned max_retx, double residual_loss_prob);

    Outcome draw(Rng& rng) const;

    /// Mean penalty of the uncapped geometric model: delay * p / (1 - p).
    double expected_uncapped_penalty_us() const;

private:
    double p_;
    SimTime retx_delay_;
    unsigned max_retx_;
    double residual_;
};

struct LinkFlowStats {
    std::uint64_t arrivals = 0;
    std::uint64_t accepted = 0;
    std::uint64_t queue_drops = 0;
    std::uint64_t arq_losses = 0;
    std::uint64_t delivered = 0;
};

/// Fixed-rate bottleneck: droptail queue, serialisation, half the base RTT of
/// propagation, then an ARQ stage that adds delay while keeping delivery FIFO.
class BottleneckLink {
public:
    using DeliveryHandler = std::function<void(const Packet&)>;
    using BacklogObserver = std::function<void(SimTime, std::size_t)>;

    BottleneckLink(EventQueue& events, LinkConfig config, std::uint64_t seed);

    void set_delivery_handler(DeliveryHandler h) { deliver_ = std::move(h); }
    void set_backlog_observer(BacklogObserver obs) { backlog_observer_ = std::move(obs); }

    EnqueueResult send(Packet p);

    const LinkConfig& config() const { return config_; }
    std::size_t backlog() const { return queue_.size(); }
    bool busy() const { return busy_; }
    const std::map<FlowId, LinkFlowStats>& flow_stats() const { return stats_; }
    LinkFlowStats total_stats() const;

private:
    void start_service();
    void finish_service();
    void notify_backlog();

    EventQueue& events_;
    LinkConfig config_;
    Rng rng_;
    ArqModel arq_;
    DropTailQueue queue_;
    bool busy_ = false;
    Packet in_service_;
    SimTime last_delivery_;
    std::uint64_t next_id_ = 1;
    std::map<FlowId, LinkFlowStats> stats_;
    DeliveryHandler deliver_;
    BacklogObserver backlog_observer_;
};

}  // namespace cclab
