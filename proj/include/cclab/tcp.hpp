#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "cclab/cc/congestion_controller.hpp"
#include "cclab/event_queue.hpp"
#include "cclab/link.hpp"
#include "cclab/metrics.hpp"
#include "cclab/segments.hpp"
#include "cclab/sim_time.hpp"

namespace cclab {

struct TransportParams {
    std::uint32_t mss = 1460;
    std::uint32_t header_bytes = 40;
    SimTime rto_min = SimTime::from_ms(200);
    SimTime rto_initial = SimTime::from_ms(1000);
    SimTime rto_max = SimTime::from_ms(60'000);
    std::int64_t initial_cwnd = 2;

    void validate() const;
};

/// Smoothed RTT / RTO estimator with gains 1/8 and 1/4.
class RttEstimator {
public:
    explicit RttEstimator(const TransportParams& p);

    /// Feeds one sample and returns the resulting RTO. The first sample sets
    /// srtt = sample and rttvar = sample / 2.
    SimTime update_rto(SimTime sample);
    /// Doubles the RTO, capped at rto_max.
    void backoff();

    bool has_sample() const { return srtt_us_.has_value(); }
    SimTime srtt() const;
    SimTime rttvar() const;
    SimTime rto() const { return rto_; }

private:
    SimTime rto_min_;
    SimTime rto_max_;
    std::optional<double> srtt_us_;
    double rttvar_us_ = 0.0;
    SimTime rto_;
};

enum class FlowEventKind {
    AckSlowStart,
    AckCongestionAvoidance,
    AckRecovery,  // partial ACK during fast recovery
    RecoveryExit,
    DupAck,
    FastRetransmit,
    Timeout,
};

std::string_view to_string(FlowEventKind k);

/// One row of the per-flow event log.
struct FlowLogRecord {
    SimTime t;
    FlowEventKind kind;
    Segments cwnd;
    Segments ssthresh;
    Segments prev_cwnd;  // window before this event was applied
    SimTime srtt;
    SimTime rto;
    std::uint64_t bytes_acked = 0;
    std::uint64_t retx_cum = 0;
    std::uint64_t timeouts_cum = 0;
};

struct RetxEpisode {
    SimTime start;
    SimTime end;
    std::uint32_t burst_len = 0;
    bool had_timeout = false;
};

struct SenderStats {
    std::uint64_t segments_sent = 0;
    std::uint64_t segments_retx = 0;
    std::uint64_t payload_bytes_sent = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t fast_retransmits = 0;
    std::optional<SimTime> first_send;
    std::optional<SimTime> last_ack_advance;
    std::vector<std::pair<SimTime, SimTime>> rtt_samples;  // (time, rtt)
    std::vector<RetxEpisode> episodes;
    std::vector<RetxRecord> retx_log;
};

/// cwnd-limited sliding-window sender with cumulative ACKs, fast retransmit,
/// NewReno partial-ACK recovery and a retransmission timer.
///
/// Segments in flight are estimated as the outstanding segments minus one per
/// duplicate ACK received; a new segment is sent only while that estimate is
/// below floor(cwnd).
class TcpSender {
public:
    using Transmit = std::function<void(const Packet&)>;
    using LogSink = std::function<void(const FlowLogRecord&)>;
    using Completion = std::function<void()>;

    static constexpr std::uint64_t kUnlimited = ~std::uint64_t{0};

    TcpSender(EventQueue& events, FlowId id, std::unique_ptr<CongestionController> cc, TransportParams params,
              Transmit transmit);
    TcpSender(const TcpSender&) = delete;
    TcpSender& operator=(const TcpSender&) = delete;

    /// Begins transmitting `app_bytes` (kUnlimited for a long-lived flow).
    void start(std::uint64_t app_bytes);
    /// Stops all activity; later ACKs and timers are ignored.
    void stop();

    /// Throws std::logic_error for an ACK beyond anything sent.
    void on_ack(std::uint64_t ack);
    void on_rto_expiry();

    void set_log_sink(LogSink sink) { log_ = std::move(sink); }
    void set_completion(Completion c) { on_complete_ = std::move(c); }

    FlowId id() const { return id_; }
    const CongestionController& controller() const { return *cc_; }
    CongestionController& controller() { return *cc_; }
    const TransportParams& params() const { return params_; }
    const RttEstimator& rtt() const { return rtt_; }
    const SenderStats& stats() const { return stats_; }

    Segments cwnd() const { return cwnd_; }
    Segments ssthresh() const { return ssthresh_; }
    std::uint64_t snd_una() const { return snd_una_; }
    std::uint64_t snd_nxt() const { return snd_nxt_; }
    std::uint64_t snd_max() const { return snd_max_; }
    std::uint32_t dupacks() const { return dupacks_; }
    bool in_recovery() const { return in_recovery_; }
    bool completed() const { return completed_; }
    bool stopped() const { return stopped_; }
    bool timer_pending() const { return events_.pending(rto_timer_); }
    /// Segments believed to be in the network.
    std::int64_t pipe() const;
    std::int64_t outstanding_segments() const;

private:
    struct SentSegment {
        std::uint64_t seq;
        std::uint32_t len;
        SimTime sent_at;
        bool retransmitted;
    };

    void handle_new_ack(std::uint64_t ack);
    void handle_dupack();
    void enter_recovery();
    void try_send();
    void transmit_segment(std::uint64_t seq);
    void retransmit_head();
    void arm_timer_if_idle();
    void restart_timer();
    void begin_episode(bool timeout);
    void maybe_end_episode();
    void log(FlowEventKind kind, Segments prev_cwnd);
    std::uint64_t app_end() const { return app_bytes_; }

    EventQueue& events_;
    FlowId id_;
    std::unique_ptr<CongestionController> cc_;
    TransportParams params_;
    Transmit transmit_;
    RttEstimator rtt_;

    std::uint64_t app_bytes_ = 0;
    std::uint64_t snd_una_ = 0;
    std::uint64_t snd_nxt_ = 0;
    std::uint64_t snd_max_ = 0;
    Segments cwnd_;
    Segments ssthresh_ = Segments::infinity();
    std::uint32_t dupacks_ = 0;
    std::int64_t sacked_out_ = 0;
    bool in_recovery_ = false;
    std::uint64_t recover_ = 0;
    bool partial_ack_seen_ = false;
    std::optional<std::uint64_t> loss_recover_;  // set by a timeout
    std::deque<SentSegment> window_;              // [snd_una, snd_max)
    EventHandle rto_timer_;
    bool started_ = false;
    bool stopped_ = false;
    bool completed_ = false;

    bool episode_active_ = false;
    std::uint64_t episode_recover_ = 0;
    RetxEpisode episode_;
    std::set<std::uint64_t> episode_segments_;

    SenderStats stats_;
    LogSink log_;
    Completion on_complete_;
};

/// Cumulative-ACK receiver with an out-of-order buffer. Every arriving
/// segment produces exactly one ACK carrying rcv_nxt.
class TcpReceiver {
public:
    std::uint64_t on_segment(std::uint64_t seq, std::uint32_t len);

    std::uint64_t rcv_nxt() const { return rcv_nxt_; }
    std::uint64_t acks_sent() const { return acks_sent_; }
    std::size_t buffered_ranges() const { return ooo_.size(); }

private:
    std::uint64_t rcv_nxt_ = 0;
    std::uint64_t acks_sent_ = 0;
    std::map<std::uint64_t, std::uint64_t> ooo_;  // start -> end
};

}  // namespace cclab
