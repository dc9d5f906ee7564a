#pragma once

#include <cstdint>

#include "cclab/cc/congestion_controller.hpp"

namespace cclab {

struct BicParams {
    double b = 0.8;
    double s_max = 32.0;
    double s_min = 0.01;
    std::int64_t low_window = 14;  // below this, grow like NewReno
};

enum class BicPhase { Unset, BinarySearch, LinearIncrease, MaxProbing };

std::string_view to_string(BicPhase p);

struct BicState {
    bool initialized = false;  // set by the first loss
    Segments cwnd_max;
    Segments cwnd_min;
    BicPhase phase = BicPhase::Unset;
};

struct BicStep {
    Segments target;
    BicPhase phase;
};

/// Window to reach by the end of the next loss-free RTT.
///
/// Below cwnd_max the target is the midpoint of [cwnd_min, cwnd_max], or
/// cwnd + S_max when the midpoint is further away than that. When the step
/// would be smaller than S_min the window snaps to cwnd_max and max probing
/// begins. Above cwnd_max the distance from cwnd_max doubles every RTT,
/// starting at S_min and capped at S_max.
BicStep bic_target(const BicState& s, Segments cwnd, const BicParams& p);

/// cwnd_max <- cwnd; cwnd <- b*cwnd; cwnd_min <- cwnd.
WindowUpdate bic_on_loss(BicState& s, Segments cwnd, const BicParams& p);

class BicController final : public CongestionController {
public:
    explicit BicController(BicParams params = {});

    Variant variant() const override { return Variant::Bic; }
    Segments on_ack_growth(Segments cwnd, Segments ssthresh, SimTime now) override;
    WindowUpdate on_3dupack(Segments cwnd, SimTime now) override;
    WindowUpdate on_timeout(Segments cwnd, SimTime now) override;

    const BicState& state() const { return state_; }

private:
    void reset_round() { round_acks_left_ = 0; }

    BicParams params_;
    BicState state_;
    // The per-RTT target is approached in equal per-ACK steps over one
    // window's worth of ACKs; the last ACK lands exactly on the target.
    Segments round_target_;
    Segments round_step_;
    std::int64_t round_acks_left_ = 0;
};

}  // namespace cclab
