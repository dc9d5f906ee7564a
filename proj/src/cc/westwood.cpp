#include "cclab/cc/westwood.hpp"

#include <algorithm>
#include <stdexcept>

#include "cclab/cc/newreno.hpp"

namespace cclab {

double westwood_update_bwe(WestwoodState& s, const WestwoodParams& p, std::uint64_t acked_bytes, SimTime now) {
    if (!s.interval_start) {
        s.interval_start = now;
        s.interval_bytes = acked_bytes;
        return s.bwe_bytes_per_s;
    }
    s.interval_bytes += acked_bytes;
    const SimTime interval = s.rtt_min ? std::max(*s.rtt_min, p.min_interval) : p.min_interval;
    const SimTime elapsed = now - *s.interval_start;
    if (elapsed < interval || elapsed.us() == 0) return s.bwe_bytes_per_s;
    const double sample = static_cast<double>(s.interval_bytes) / elapsed.seconds();
    s.bwe_bytes_per_s = p.filter_gain * s.bwe_bytes_per_s + (1.0 - p.filter_gain) * sample;
    ++s.bwe_samples;
    s.interval_start = now;
    s.interval_bytes = 0;
    return s.bwe_bytes_per_s;
}

std::optional<Segments> westwood_bdp_segments(const WestwoodState& s, std::uint32_t mss) {
    if (!s.rtt_min || s.bwe_bytes_per_s <= 0.0) return std::nullopt;
    return Segments::from_double(s.bwe_bytes_per_s * s.rtt_min->seconds() / static_cast<double>(mss));
}

WindowUpdate westwood_on_3dupack(const WestwoodState& s, Segments cwnd, std::uint32_t mss, const WestwoodParams& p) {
    const auto bdp = westwood_bdp_segments(s, mss);
    if (!bdp) return multiplicative_decrease(cwnd, Segments::from_double(p.fallback_b));
    const Segments w = max(*bdp, Segments{1});
    return {w, w};
}

WestwoodController::WestwoodController(WestwoodParams params, std::uint32_t mss) : params_(params), mss_(mss) {
    if (!(params.filter_gain >= 0.0 && params.filter_gain < 1.0))
        throw std::invalid_argument("westwood.filter_gain must be in [0,1)");
    if (!(params.fallback_b > 0.0 && params.fallback_b < 1.0))
        throw std::invalid_argument("westwood.fallback_b must be in (0,1)");
}

void WestwoodController::on_ack_observed(const AckInfo& ack) {
    if (ack.rtt_sample && (!state_.rtt_min || *ack.rtt_sample < *state_.rtt_min)) state_.rtt_min = ack.rtt_sample;

    // A duplicate ACK means one segment left the network; credit it now and
    // discount it from the cumulative ACK that eventually covers it.
    std::uint64_t delivered = ack.acked_bytes;
    if (ack.duplicate) {
        state_.dupack_credit += ack.mss;
        delivered = ack.mss;
    } else if (delivered > ack.mss) {
        if (state_.dupack_credit >= delivered) {
            state_.dupack_credit -= delivered;
            delivered = ack.mss;
        } else {
            delivered -= state_.dupack_credit;
            state_.dupack_credit = 0;
        }
    }
    westwood_update_bwe(state_, params_, delivered, ack.now);
}

Segments WestwoodController::on_ack_growth(Segments cwnd, Segments ssthresh, SimTime) {
    if (cwnd < ssthresh) return slow_start_step(cwnd, ssthresh);
    return cwnd + newreno_growth(cwnd, false);
}

WindowUpdate WestwoodController::on_3dupack(Segments cwnd, SimTime) {
    const auto bdp = westwood_bdp_segments(state_, mss_);
    if (!bdp) ++fallbacks_;
    else if (*bdp > cwnd) ++overshoots_;
    return westwood_on_3dupack(state_, cwnd, mss_, params_);
}

WindowUpdate WestwoodController::on_timeout(Segments cwnd, SimTime) {
    const auto bdp = westwood_bdp_segments(state_, mss_);
    if (!bdp) {
        ++fallbacks_;
        return timeout_decrease(cwnd, Segments::from_double(params_.fallback_b));
    }
    return {Segments{1}, max(*bdp, Segments{kMinTimeoutSsthresh})};
}

}  // namespace cclab
