#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cclab/segments.hpp"
#include "cclab/sim_time.hpp"

namespace cclab {

enum class Variant { NewReno, WestwoodPlus, Bic, Cubic };

std::string_view to_string(Variant v);
/// Accepts "newreno", "westwood+", "westwood", "bic", "cubic".
Variant parse_variant(std::string_view name);

/// What the sender reports to its controller on every ACK, including
/// duplicates and ACKs received during loss recovery.
struct AckInfo {
    SimTime now;
    std::uint64_t acked_bytes = 0;  // newly cumulatively acknowledged
    bool duplicate = false;
    std::optional<SimTime> rtt_sample;  // only from never-retransmitted segments
    std::uint32_t mss = 1460;
};

struct WindowUpdate {
    Segments cwnd;
    Segments ssthresh;
};

/// Per-variant window arithmetic. Loss recovery itself (fast retransmit,
/// partial ACKs, RTO) lives in the sender and is shared by all variants.
class CongestionController {
public:
    virtual ~CongestionController() = default;

    virtual Variant variant() const = 0;

    /// Observes every ACK; used for bandwidth and RTT estimation.
    virtual void on_ack_observed(const AckInfo&) {}

    /// Window after one new-data ACK outside recovery.
    virtual Segments on_ack_growth(Segments cwnd, Segments ssthresh, SimTime now) = 0;

    /// Response to the third duplicate ACK.
    virtual WindowUpdate on_3dupack(Segments cwnd, SimTime now) = 0;

    /// Response to retransmission timer expiry. cwnd is always one segment.
    virtual WindowUpdate on_timeout(Segments cwnd, SimTime now) = 0;
};

/// Slow start: cwnd + 1, capped at ssthresh. Shared by every variant.
Segments slow_start_step(Segments cwnd, Segments ssthresh);

/// RFC-style floor on the post-timeout threshold.
inline constexpr std::int64_t kMinTimeoutSsthresh = 2;

}  // namespace cclab
