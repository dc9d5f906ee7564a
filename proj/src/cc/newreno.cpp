#include "cclab/cc/newreno.hpp"

#include <stdexcept>

namespace cclab {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::NewReno: return "newreno";
        case Variant::WestwoodPlus: return "westwood+";
        case Variant::Bic: return "bic";
        case Variant::Cubic: return "cubic";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    if (name == "newreno" || name == "reno") return Variant::NewReno;
    if (name == "westwood+" || name == "westwood" || name == "westwoodplus") return Variant::WestwoodPlus;
    if (name == "bic") return Variant::Bic;
    if (name == "cubic") return Variant::Cubic;
    throw std::invalid_argument("unknown TCP variant '" + std::string(name) + "'");
}

Segments slow_start_step(Segments cwnd, Segments ssthresh) { return min(cwnd + Segments{1}, max(ssthresh, cwnd)); }

Segments newreno_growth(Segments cwnd, bool in_slow_start) {
    if (in_slow_start) return Segments{1};
    return cwnd.reciprocal();
}

WindowUpdate multiplicative_decrease(Segments cwnd, Segments b) {
    const Segments w = max(cwnd.scaled(b), Segments{1});
    return {w, w};
}

WindowUpdate timeout_decrease(Segments cwnd, Segments b) {
    return {Segments{1}, max(cwnd.scaled(b), Segments{kMinTimeoutSsthresh})};
}

NewRenoController::NewRenoController(NewRenoParams params) : b_(Segments::from_double(params.b)) {
    if (!(params.b > 0.0 && params.b < 1.0)) throw std::invalid_argument("newreno.b must be in (0,1)");
}

Segments NewRenoController::on_ack_growth(Segments cwnd, Segments ssthresh, SimTime) {
    if (cwnd < ssthresh) return slow_start_step(cwnd, ssthresh);
    return cwnd + newreno_growth(cwnd, false);
}

WindowUpdate NewRenoController::on_3dupack(Segments cwnd, SimTime) { return multiplicative_decrease(cwnd, b_); }

WindowUpdate NewRenoController::on_timeout(Segments cwnd, SimTime) { return timeout_decrease(cwnd, b_); }

}  // namespace cclab
