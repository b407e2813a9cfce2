#include "hypetc/petc.hpp"

#include <cmath>
#include <string>

#include "hypetc/error.hpp"

namespace hypetc {

namespace {

std::int64_t floor_steps(double span, double dt) {
    // Guard against 0.13 / 1e-4 = 1299.9999999.
    return static_cast<std::int64_t>(std::floor(span / dt + 1e-9));
}

}  // namespace

PetcConfig select_h(const DesignConstants& consts, double h_frac, double dt) {
    if (!(h_frac > 0.0 && h_frac <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "h_frac must lie in (0, 1]");
    }
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    const std::int64_t steps = floor_steps(h_frac * consts.tau, dt);
    if (steps < 1) {
        throw Error(ErrorCode::DtTooCoarse, "h_frac * tau = " +
                                                std::to_string(h_frac * consts.tau) +
                                                " is shorter than dt");
    }
    return {static_cast<double>(steps) * dt, steps, true};
}

PetcConfig fixed_h(double h, const DesignConstants& consts, double dt) {
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling period must be positive");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    if (h > consts.tau) {
        throw Error(ErrorCode::InvalidArgument, "sampling period " + std::to_string(h) +
                                                    " exceeds the dwell-time " +
                                                    std::to_string(consts.tau));
    }
    const std::int64_t steps = floor_steps(h, dt);
    if (steps < 1) throw Error(ErrorCode::DtTooCoarse, "sampling period is shorter than dt");
    return {static_cast<double>(steps) * dt, steps, false};
}

double gamma_p(double d, double m, const DesignConstants& k, const EtcParams& p, double h) {
    const double coeff = std::exp(k.a * h) * (k.theta_m + k.a * p.theta) - k.theta_m;
    return coeff * d * d + k.a * m;
}

bool petc_should_trigger(double t, double h, double d, double m, const DesignConstants& k,
                         const EtcParams& p) {
    if (!(h > 0.0)) return false;
    const double n = t / h;
    if (std::abs(n - std::round(n)) > 1e-9) return false;
    return gamma_p(d, m, k, p, h) > 0.0;
}

}  // namespace hypetc
