#pragma once

#include <cstdint>
#include <optional>

#include "cclab/cc/congestion_controller.hpp"

namespace cclab {

struct WestwoodParams {
    double filter_gain = 0.9;  // weight of the previous estimate
    SimTime min_interval = SimTime::from_ms(50);
    double fallback_b = 0.5;  // used only while the estimate is uninitialised
};

/// Bandwidth estimate and minimum RTT gathered from the ACK stream.
struct WestwoodState {
    double bwe_bytes_per_s = 0.0;
    std::optional<SimTime> rtt_min;
    std::uint64_t interval_bytes = 0;
    std::optional<SimTime> interval_start;
    std::uint64_t bwe_samples = 0;
    // Bytes already credited through duplicate ACKs and not yet acknowledged.
    std::uint64_t dupack_credit = 0;
};

/// Adds acked_bytes to the current interval. Once the interval has lasted
/// max(rtt_min, min_interval) it closes: sample = bytes / interval length and
/// BWE <- g*BWE + (1-g)*sample. Returns the (possibly unchanged) BWE.
double westwood_update_bwe(WestwoodState& s, const WestwoodParams& p, std::uint64_t acked_bytes, SimTime now);

/// BWE * RTT_min in segments of `mss` bytes; nullopt while uninitialised.
std::optional<Segments> westwood_bdp_segments(const WestwoodState& s, std::uint32_t mss);

/// cwnd = ssthresh = BWE * RTT_min (at least one segment). Falls back to
/// halving when no estimate exists yet.
WindowUpdate westwood_on_3dupack(const WestwoodState& s, Segments cwnd, std::uint32_t mss, const WestwoodParams& p);

class WestwoodController final : public CongestionController {
public:
    explicit WestwoodController(WestwoodParams params = {}, std::uint32_t mss = 1460);

    Variant variant() const override { return Variant::WestwoodPlus; }
    void on_ack_observed(const AckInfo& ack) override;
    Segments on_ack_growth(Segments cwnd, Segments ssthresh, SimTime now) override;
    WindowUpdate on_3dupack(Segments cwnd, SimTime now) override;
    WindowUpdate on_timeout(Segments cwnd, SimTime now) override;

    const WestwoodState& state() const { return state_; }
    /// Decreases where BWE*RTT_min exceeded the pre-loss window.
    std::uint64_t overshoot_count() const { return overshoots_; }
    std::uint64_t fallback_count() const { return fallbacks_; }

private:
    WestwoodParams params_;
    std::uint32_t mss_;
    WestwoodState state_;
    std::uint64_t overshoots_ = 0;
    std::uint64_t fallbacks_ = 0;
};

}  // namespace cclab
