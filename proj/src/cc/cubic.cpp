#include "cclab/cc/cubic.hpp"

#include <cmath>
#include <stdexcept>

namespace cclab {

double cubic_k(Segments max_win, const CubicParams& p) { return std::cbrt(max_win.to_double() * p.b / p.c); }

Segments cubic_window_at(const CubicState& s, double elapsed_s, const CubicParams& p) {
    const double d = elapsed_s - s.k_seconds;
    const double w = p.c * d * d * d + s.origin.to_double();
    return max(Segments::from_double(w), Segments{1});
}

Segments cubic_window(const CubicState& s, SimTime now, const CubicParams& p) {
    return cubic_window_at(s, (now - s.epoch_start).seconds(), p);
}

WindowUpdate cubic_on_loss(CubicState& s, Segments cwnd, SimTime now, const CubicParams& p) {
    const Segments reduced = max(cwnd.scaled(Segments::from_double(1.0 - p.b)), Segments{1});
    s.max_win = cwnd;
    s.origin = cwnd;
    s.k_seconds = cubic_k(cwnd, p);
    s.epoch_start = now;
    s.epoch_valid = true;
    s.epoch_cwnd = reduced;
    return {reduced, reduced};
}

CubicController::CubicController(CubicParams params) : params_(params) {
    if (!(params.c > 0.0)) throw std::invalid_argument("cubic.c must be > 0");
    if (!(params.b > 0.0 && params.b < 1.0)) throw std::invalid_argument("cubic.b must be in (0,1)");
}

void CubicController::on_ack_observed(const AckInfo& ack) {
    if (ack.rtt_sample && (!state_.rtt_min || *ack.rtt_sample < *state_.rtt_min)) state_.rtt_min = ack.rtt_sample;
}

void CubicController::start_epoch(Segments cwnd, SimTime now) {
    // Epoch opened by congestion avoidance itself (after a timeout's slow
    // start, or with no loss yet): the curve passes through the current window.
    state_.epoch_start = now;
    state_.epoch_valid = true;
    state_.epoch_cwnd = cwnd;
    if (cwnd < state_.max_win) {
        state_.origin = state_.max_win;
        state_.k_seconds = std::cbrt((state_.max_win - cwnd).to_double() / params_.c);
    } else {
        state_.origin = cwnd;
        state_.k_seconds = 0.0;
    }
}

Segments CubicController::on_ack_growth(Segments cwnd, Segments ssthresh, SimTime now) {
    if (cwnd < ssthresh) return slow_start_step(cwnd, ssthresh);
    if (!state_.epoch_valid) start_epoch(cwnd, now);
    Segments w = cubic_window(state_, now, params_);
    if (params_.tcp_friendly && state_.rtt_min && state_.rtt_min->us() > 0) {
        // Window an AIMD flow with the same decrease factor would have by now.
        const double t = (now - state_.epoch_start).seconds();
        const double aimd_rate = 3.0 * params_.b / (2.0 - params_.b);
        const double w_tcp = state_.epoch_cwnd.to_double() + aimd_rate * t / state_.rtt_min->seconds();
        w = max(w, Segments::from_double(w_tcp));
    }
    return w;
}

WindowUpdate CubicController::on_3dupack(Segments cwnd, SimTime now) { return cubic_on_loss(state_, cwnd, now, params_); }

WindowUpdate CubicController::on_timeout(Segments cwnd, SimTime) {
    state_.max_win = cwnd;
    state_.epoch_valid = false;
    const Segments ssthresh = max(cwnd.scaled(Segments::from_double(1.0 - params_.b)), Segments{kMinTimeoutSsthresh});
    return {Segments{1}, ssthresh};
}

}  // namespace cclab
