#include "cclab/cc/factory.hpp"

namespace cclab {

std::unique_ptr<CongestionController> make_controller(Variant v, const CcParams& params, std::uint32_t mss) {
    switch (v) {
        case Variant::NewReno: return std::make_unique<NewRenoController>(params.newreno);
        case Variant::WestwoodPlus: return std::make_unique<WestwoodController>(params.westwood, mss);
        case Variant::Bic: return std::make_unique<BicController>(params.bic);
        case Variant::Cubic: return std::make_unique<CubicController>(params.cubic);
    }
    return nullptr;
}

}  // namespace cclab
