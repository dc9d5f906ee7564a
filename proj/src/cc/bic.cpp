#include "cclab/cc/bic.hpp"

#include <stdexcept>

#include "cclab/cc/newreno.hpp"

namespace cclab {

std::string_view to_string(BicPhase p) {
    switch (p) {
        case BicPhase::Unset: return "unset";
        case BicPhase::BinarySearch: return "binary_search";
        case BicPhase::LinearIncrease: return "linear_increase";
        case BicPhase::MaxProbing: return "max_probing";
    }
    return "unknown";
}

BicStep bic_target(const BicState& s, Segments cwnd, const BicParams& p) {
    const Segments s_max = Segments::from_double(p.s_max);
    const Segments s_min = Segments::from_double(p.s_min);
    if (s.phase == BicPhase::MaxProbing || cwnd >= s.cwnd_max) {
        const Segments inc = min(max(cwnd - s.cwnd_max, s_min), s_max);
        return {cwnd + inc, BicPhase::MaxProbing};
    }
    const Segments mid = Segments::from_raw((s.cwnd_min.raw() + s.cwnd_max.raw()) / 2);
    if (mid - cwnd > s_max) return {cwnd + s_max, BicPhase::LinearIncrease};
    if (mid - cwnd < s_min) return {s.cwnd_max, BicPhase::MaxProbing};
    return {mid, BicPhase::BinarySearch};
}

WindowUpdate bic_on_loss(BicState& s, Segments cwnd, const BicParams& p) {
    const Segments reduced = max(cwnd.scaled(Segments::from_double(p.b)), Segments{1});
    s.initialized = true;
    s.cwnd_max = cwnd;
    s.cwnd_min = reduced;
    s.phase = BicPhase::BinarySearch;
    return {reduced, reduced};
}

BicController::BicController(BicParams params) : params_(params) {
    if (!(params.b > 0.0 && params.b < 1.0)) throw std::invalid_argument("bic.b must be in (0,1)");
    if (!(params.s_min > 0.0 && params.s_max >= params.s_min))
        throw std::invalid_argument("bic thresholds must satisfy 0 < s_min <= s_max");
}

Segments BicController::on_ack_growth(Segments cwnd, Segments ssthresh, SimTime) {
    if (cwnd < ssthresh) {
        reset_round();
        return slow_start_step(cwnd, ssthresh);
    }
    if (!state_.initialized || cwnd < Segments{params_.low_window}) {
        reset_round();
        return cwnd + newreno_growth(cwnd, false);
    }
    if (round_acks_left_ == 0) {
        const BicStep step = bic_target(state_, cwnd, params_);
        state_.phase = step.phase;
        round_target_ = step.target;
        round_acks_left_ = std::max<std::int64_t>(1, cwnd.floor());
        round_step_ = Segments::from_raw((step.target - cwnd).raw() / round_acks_left_);
    }
    if (--round_acks_left_ > 0) return cwnd + round_step_;
    // A loss-free RTT at the target: it becomes the new lower bound.
    if (state_.phase != BicPhase::MaxProbing) state_.cwnd_min = round_target_;
    return round_target_;
}

WindowUpdate BicController::on_3dupack(Segments cwnd, SimTime) {
    reset_round();
    return bic_on_loss(state_, cwnd, params_);
}

WindowUpdate BicController::on_timeout(Segments cwnd, SimTime) {
    reset_round();
    const WindowUpdate after = bic_on_loss(state_, cwnd, params_);
    return {Segments{1}, max(after.ssthresh, Segments{kMinTimeoutSsthresh})};
}

}  // namespace cclab
