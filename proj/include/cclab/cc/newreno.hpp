#pragma once

#include "cclab/cc/congestion_controller.hpp"

namespace cclab {

struct NewRenoParams {
    double b = 0.5;
};

/// Per-ACK increment: one segment in slow start, 1/cwnd in congestion avoidance.
Segments newreno_growth(Segments cwnd, bool in_slow_start);

class NewRenoController final : public CongestionController {
public:
    explicit NewRenoController(NewRenoParams params = {});

    Variant variant() const override { return Variant::NewReno; }
    Segments on_ack_growth(Segments cwnd, Segments ssthresh, SimTime now) override;
    WindowUpdate on_3dupack(Segments cwnd, SimTime now) override;
    WindowUpdate on_timeout(Segments cwnd, SimTime now) override;

private:
    Segments b_;
};

/// cwnd <- b*cwnd; ssthresh <- cwnd, floored at one segment.
WindowUpdate multiplicative_decrease(Segments cwnd, Segments b);
/// cwnd <- 1; ssthresh <- max(b*cwnd, 2).
WindowUpdate timeout_decrease(Segments cwnd, Segments b);

}  // namespace cclab
