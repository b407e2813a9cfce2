#pragma once

#include <cstdint>

#include "hypetc/trigger.hpp"

namespace hypetc {

struct PetcConfig {
    double h = 0.0;           // sampling period [s], a multiple of dt
    std::int64_t steps = 0;   // h / dt
    bool h_auto = false;
};

/// h = floor(h_frac tau / dt) dt. Throws DtTooCoarse or InvalidArgument.
PetcConfig select_h(const DesignConstants& consts, double h_frac, double dt);

/// Explicit period, floored to the dt grid and checked against 0 < h <= tau.
PetcConfig fixed_h(double h, const DesignConstants& consts, double dt);

/// (e^{a h}(theta_m + a theta) - theta_m) d^2 + a m.
double gamma_p(double d, double m, const DesignConstants& consts, const EtcParams& params,
               double h);

/// True iff t sits on the h-grid (to 1e-9 of a period) and gamma_p > 0.
bool petc_should_trigger(double t, double h, double d, double m, const DesignConstants& consts,
                         const EtcParams& params);

}  // namespace hypetc
