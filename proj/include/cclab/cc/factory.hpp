#pragma once

#include <memory>

#include "cclab/cc/bic.hpp"
#include "cclab/cc/cubic.hpp"
#include "cclab/cc/newreno.hpp"
#include "cclab/cc/westwood.hpp"

namespace cclab {

struct CcParams {
    NewRenoParams newreno;
    WestwoodParams westwood;
    BicParams bic;
    CubicParams cubic;
};

std::unique_ptr<CongestionController> make_controller(Variant v, const CcParams& params, std::uint32_t mss = 1460);

}  // namespace cclab
