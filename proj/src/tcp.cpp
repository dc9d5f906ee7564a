#include "cclab/tcp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cclab {

void TransportParams::validate() const {
    if (mss == 0) throw std::invalid_argument("transport.mss must be > 0");
    if (rto_min.us() == 0) throw std::invalid_argument("transport.rto_min_ms must be > 0");
    if (rto_max < rto_min) throw std::invalid_argument("transport.rto_max_ms must be >= rto_min_ms");
    if (rto_initial < rto_min) throw std::invalid_argument("transport.rto_initial_ms must be >= rto_min_ms");
    if (initial_cwnd < 1) throw std::invalid_argument("transport.initial_cwnd must be >= 1");
}

// --- RttEstimator ---------------------------------------------------------

RttEstimator::RttEstimator(const TransportParams& p) : rto_min_(p.rto_min), rto_max_(p.rto_max), rto_(p.rto_initial) {}

SimTime RttEstimator::update_rto(SimTime sample) {
    const double s = static_cast<double>(sample.us());
    if (!srtt_us_) {
        srtt_us_ = s;
        rttvar_us_ = s / 2.0;
    } else {
        rttvar_us_ = 0.75 * rttvar_us_ + 0.25 * std::fabs(*srtt_us_ - s);
        srtt_us_ = 0.875 * *srtt_us_ + 0.125 * s;
    }
    const auto raw = SimTime::from_us(static_cast<SimTime::rep>(std::llround(*srtt_us_ + 4.0 * rttvar_us_)));
    rto_ = std::clamp(raw, rto_min_, rto_max_);
    return rto_;
}

void RttEstimator::backoff() {
    rto_ = rto_ > SimTime::from_us(rto_max_.us() / 2) ? rto_max_ : rto_ * 2;
}

SimTime RttEstimator::srtt() const {
    return srtt_us_ ? SimTime::from_us(static_cast<SimTime::rep>(std::llround(*srtt_us_))) : SimTime{};
}

SimTime RttEstimator::rttvar() const { return SimTime::from_us(static_cast<SimTime::rep>(std::llround(rttvar_us_))); }

std::string_view to_string(FlowEventKind k) {
    switch (k) {
        case FlowEventKind::AckSlowStart: return "ack_ss";
        case FlowEventKind::AckCongestionAvoidance: return "ack_ca";
        case FlowEventKind::AckRecovery: return "ack_partial";
        case FlowEventKind::RecoveryExit: return "recovery_exit";
        case FlowEventKind::DupAck: return "dupack";
        case FlowEventKind::FastRetransmit: return "fast_retransmit";
        case FlowEventKind::Timeout: return "timeout";
    }
    return "unknown";
}

// --- TcpSender ------------------------------------------------------------

TcpSender::TcpSender(EventQueue& events, FlowId id, std::unique_ptr<CongestionController> cc, TransportParams params,
                     Transmit transmit)
    : events_(events),
      id_(id),
      cc_(std::move(cc)),
      params_((params.validate(), params)),
      transmit_(std::move(transmit)),
      rtt_(params_),
      cwnd_(params_.initial_cwnd) {
    if (!cc_) throw std::invalid_argument("TcpSender: controller required");
}

void TcpSender::start(std::uint64_t app_bytes) {
    if (started_) throw std::logic_error("TcpSender: already started");
    started_ = true;
    app_bytes_ = app_bytes;
    if (app_bytes_ == 0) {
        completed_ = true;
        return;
    }
    try_send();
}

void TcpSender::stop() {
    stopped_ = true;
    events_.cancel(rto_timer_);
}

std::int64_t TcpSender::outstanding_segments() const {
    const std::uint64_t bytes = snd_nxt_ - snd_una_;
    return static_cast<std::int64_t>((bytes + params_.mss - 1) / params_.mss);
}

std::int64_t TcpSender::pipe() const { return std::max<std::int64_t>(0, outstanding_segments() - sacked_out_); }

void TcpSender::on_ack(std::uint64_t ack) {
    if (stopped_) return;
    if (ack > snd_max_)
        throw std::logic_error("TcpSender: ACK " + std::to_string(ack) + " beyond snd_max " + std::to_string(snd_max_));
    if (ack > snd_una_) {
        handle_new_ack(ack);
    } else if (ack == snd_una_ && snd_max_ > snd_una_) {
        handle_dupack();
    }
}

void TcpSender::handle_new_ack(std::uint64_t ack) {
    const SimTime now = events_.now();
    const Segments prev = cwnd_;
    const std::uint64_t acked_bytes = ack - snd_una_;

    std::int64_t acked_segments = 0;
    bool any_retransmitted = false;
    std::optional<SimTime> newest_sent;
    while (!window_.empty() && window_.front().seq + window_.front().len <= ack) {
        any_retransmitted |= window_.front().retransmitted;
        newest_sent = window_.front().sent_at;
        window_.pop_front();
        ++acked_segments;
    }
    snd_una_ = ack;
    if (snd_nxt_ < snd_una_) snd_nxt_ = snd_una_;
    stats_.last_ack_advance = now;

    // Karn: never sample an ACK that covers a retransmitted segment.
    std::optional<SimTime> sample;
    if (!any_retransmitted && newest_sent) {
        sample = now - *newest_sent;
        rtt_.update_rto(*sample);
        stats_.rtt_samples.emplace_back(now, *sample);
    }
    cc_->on_ack_observed({now, acked_bytes, false, sample, params_.mss});

    FlowEventKind kind;
    if (in_recovery_) {
        if (ack >= recover_) {
            in_recovery_ = false;
            dupacks_ = 0;
            sacked_out_ = 0;
            kind = FlowEventKind::RecoveryExit;
            restart_timer();
        } else {
            // Partial ACK: the next hole is lost too. Retransmit it without
            // touching the window again.
            sacked_out_ -= std::min<std::int64_t>(std::max<std::int64_t>(acked_segments - 1, 0), sacked_out_);
            kind = FlowEventKind::AckRecovery;
            retransmit_head();
            if (!partial_ack_seen_) {
                partial_ack_seen_ = true;
                restart_timer();
            }
        }
    } else {
        dupacks_ = 0;
        sacked_out_ = 0;
        kind = cwnd_ < ssthresh_ ? FlowEventKind::AckSlowStart : FlowEventKind::AckCongestionAvoidance;
        cwnd_ = cc_->on_ack_growth(cwnd_, ssthresh_, now);
        if (cwnd_ < Segments{1}) throw std::logic_error("TcpSender: controller shrank cwnd below one segment");
        restart_timer();
    }
    // Duplicates of go-back-N resends still arrive with ack == recovery point,
    // so only an ACK strictly beyond it re-enables fast retransmit.
    if (loss_recover_ && snd_una_ > *loss_recover_) loss_recover_.reset();
    maybe_end_episode();

    if (snd_una_ >= app_end()) {
        completed_ = true;
        events_.cancel(rto_timer_);
        log(kind, prev);
        if (on_complete_) on_complete_();
        return;
    }
    try_send();
    log(kind, prev);
}

void TcpSender::handle_dupack() {
    const Segments prev = cwnd_;
    cc_->on_ack_observed({events_.now(), 0, true, std::nullopt, params_.mss});
    // After a timeout, duplicates come from go-back-N resends of data the
    // receiver already holds; they carry no loss signal.
    if (loss_recover_) return;

    ++dupacks_;
    sacked_out_ = std::min<std::int64_t>(sacked_out_ + 1, std::max<std::int64_t>(outstanding_segments() - 1, 0));
    if (!in_recovery_ && dupacks_ == 3) {
        enter_recovery();
        return;
    }
    try_send();
    log(FlowEventKind::DupAck, prev);
}

void TcpSender::enter_recovery() {
    const Segments prev = cwnd_;
    const WindowUpdate upd = cc_->on_3dupack(cwnd_, events_.now());
    cwnd_ = max(upd.cwnd, Segments{1});
    ssthresh_ = upd.ssthresh;
    in_recovery_ = true;
    recover_ = snd_max_;
    partial_ack_seen_ = false;
    ++stats_.fast_retransmits;
    begin_episode(false);
    retransmit_head();
    restart_timer();
    try_send();
    log(FlowEventKind::FastRetransmit, prev);
}

void TcpSender::on_rto_expiry() {
    if (stopped_ || completed_) return;
    if (snd_una_ >= snd_max_) throw std::logic_error("TcpSender: RTO fired with nothing outstanding");
    const Segments prev = cwnd_;
    ++stats_.timeouts;
    const WindowUpdate upd = cc_->on_timeout(cwnd_, events_.now());
    if (upd.cwnd != Segments{1}) throw std::logic_error("TcpSender: timeout must leave cwnd at one segment");
    cwnd_ = upd.cwnd;
    ssthresh_ = upd.ssthresh;
    in_recovery_ = false;
    dupacks_ = 0;
    sacked_out_ = 0;
    loss_recover_ = snd_max_;
    snd_nxt_ = snd_una_;
    rtt_.backoff();
    begin_episode(true);
    try_send();
    log(FlowEventKind::Timeout, prev);
}

void TcpSender::try_send() {
    if (stopped_ || completed_) return;
    while (snd_nxt_ < app_end() && pipe() < cwnd_.floor()) {
        const std::uint64_t seq = snd_nxt_;
        transmit_segment(seq);
        snd_nxt_ = std::max(snd_nxt_, seq + std::min<std::uint64_t>(params_.mss, app_end() - seq));
        if (pipe() > cwnd_.floor()) throw std::logic_error("TcpSender: window discipline violated");
    }
}

void TcpSender::transmit_segment(std::uint64_t seq) {
    const SimTime now = events_.now();
    const auto len = static_cast<std::uint32_t>(std::min<std::uint64_t>(params_.mss, app_end() - seq));
    const bool retx = seq < snd_max_;
    if (retx) {
        const std::size_t idx = (seq - snd_una_) / params_.mss;
        SentSegment& rec = window_.at(idx);
        if (rec.seq != seq) throw std::logic_error("TcpSender: segment map out of sync");
        rec.sent_at = now;
        rec.retransmitted = true;
        ++stats_.segments_retx;
        if (!episode_active_) begin_episode(false);
        episode_segments_.insert(seq);
        stats_.retx_log.push_back({now, seq, static_cast<std::uint32_t>(stats_.episodes.size())});
    } else {
        window_.push_back({seq, len, now, false});
        snd_max_ = seq + len;
    }
    if (!stats_.first_send) stats_.first_send = now;
    ++stats_.segments_sent;
    stats_.payload_bytes_sent += len;

    Packet p;
    p.flow = id_;
    p.seq = seq;
    p.payload = len;
    p.wire_bytes = len + params_.header_bytes;
    p.retransmission = retx;
    transmit_(p);
    arm_timer_if_idle();
}

void TcpSender::retransmit_head() {
    if (snd_una_ < snd_max_) transmit_segment(snd_una_);
}

void TcpSender::arm_timer_if_idle() {
    if (!events_.pending(rto_timer_)) restart_timer();
}

void TcpSender::restart_timer() {
    events_.cancel(rto_timer_);
    if (snd_una_ < snd_max_ && !stopped_) rto_timer_ = events_.schedule_in(rtt_.rto(), [this] { on_rto_expiry(); });
}

void TcpSender::begin_episode(bool timeout) {
    if (!episode_active_) {
        episode_active_ = true;
        episode_ = RetxEpisode{events_.now(), events_.now(), 0, false};
        episode_segments_.clear();
    }
    episode_.had_timeout |= timeout;
    episode_recover_ = std::max(episode_recover_, snd_max_);
}

void TcpSender::maybe_end_episode() {
    if (!episode_active_ || in_recovery_ || snd_una_ < episode_recover_) return;
    episode_active_ = false;
    episode_.end = events_.now();
    episode_.burst_len = static_cast<std::uint32_t>(episode_segments_.size());
    stats_.episodes.push_back(episode_);
}

void TcpSender::log(FlowEventKind kind, Segments prev_cwnd) {
    if (!log_) return;
    log_({events_.now(), kind, cwnd_, ssthresh_, prev_cwnd, rtt_.srtt(), rtt_.rto(), snd_una_, stats_.segments_retx,
          stats_.timeouts});
}

// --- TcpReceiver ----------------------------------------------------------

std::uint64_t TcpReceiver::on_segment(std::uint64_t seq, std::uint32_t len) {
    const std::uint64_t end = seq + len;
    if (end > rcv_nxt_) {
        if (seq <= rcv_nxt_) {
            rcv_nxt_ = end;
        } else {
            auto [it, inserted] = ooo_.emplace(seq, end);
            if (!inserted) it->second = std::max(it->second, end);
        }
        // Pull in any buffered ranges that are now contiguous.
        for (auto it = ooo_.begin(); it != ooo_.end() && it->first <= rcv_nxt_;) {
            rcv_nxt_ = std::max(rcv_nxt_, it->second);
            it = ooo_.erase(it);
        }
    }
    ++acks_sent_;
    return rcv_nxt_;
}

}  // namespace cclab
