#pragma once

#include <optional>

#include "cclab/cc/congestion_controller.hpp"

namespace cclab {

struct CubicParams {
    double c = 0.4;  // segments / s^3
    double b = 0.2;  // fraction of the window removed on loss
    bool tcp_friendly = true;
};

/// State of the current cubic epoch. The window follows
///   W(t) = C (t - K)^3 + origin,   t = now - epoch_start,
/// where after a fast-retransmit loss origin = max_win and
/// K = cbrt(max_win * b / C).
struct CubicState {
    Segments max_win;  // window reached before the last reduction
    Segments origin;   // plateau of the current epoch
    double k_seconds = 0.0;
    SimTime epoch_start;
    bool epoch_valid = false;
    Segments epoch_cwnd;  // window at epoch start, base of the TCP-friendly estimate
    std::optional<SimTime> rtt_min;
};

/// cbrt(max_win * b / C).
double cubic_k(Segments max_win, const CubicParams& p);

/// W at `elapsed_s` seconds into the epoch, floored at one segment.
Segments cubic_window_at(const CubicState& s, double elapsed_s, const CubicParams& p);
Segments cubic_window(const CubicState& s, SimTime now, const CubicParams& p);

/// max_win <- cwnd; cwnd <- (1-b)*cwnd; K recomputed; epoch starts at `now`.
WindowUpdate cubic_on_loss(CubicState& s, Segments cwnd, SimTime now, const CubicParams& p);

class CubicController final : public CongestionController {
public:
    explicit CubicController(CubicParams params = {});

    Variant variant() const override { return Variant::Cubic; }
    void on_ack_observed(const AckInfo& ack) override;
    Segments on_ack_growth(Segments cwnd, Segments ssthresh, SimTime now) override;
    WindowUpdate on_3dupack(Segments cwnd, SimTime now) override;
    WindowUpdate on_timeout(Segments cwnd, SimTime now) override;

    const CubicState& state() const { return state_; }
    const CubicParams& params() const { return params_; }

private:
    void start_epoch(Segments cwnd, SimTime now);

    CubicParams params_;
    CubicState state_;
};

}  // namespace cclab
