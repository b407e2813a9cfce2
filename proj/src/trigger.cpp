#include "hypetc/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hypetc/error.hpp"

namespace hypetc {

void EtcParams::validate() const {
    if (!(eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "eta must be positive");
    if (!(theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
    if (!(sigma > 0.0 && sigma < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "sigma must lie in (0, 1)");
    }
    if (!(m0 < 0.0)) throw Error(ErrorCode::InvalidArgument, "m0 must be negative");
    if (!(delta > 0.0 && delta < mu)) {
        throw Error(ErrorCode::InvalidArgument, "delta must satisfy 0 < delta < mu");
    }
    if (C && !(*C > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
    if (!C && !(c_margin > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "c_margin must be positive when C is derived");
    }
}

double mu_upper_bound(const PlantCoefficients& c) {
    const double rq = std::abs(c.rho * c.q);
    if (!(rq < 0.5)) {
        throw Error(ErrorCode::AssumptionViolated,
                    "|rho q| = " + std::to_string(rq) + " is not below 1/2");
    }
    return 2.0 * c.lambda1 * c.lambda2 / (c.ell * (c.lambda1 + c.lambda2)) *
           std::log(1.0 / (2.0 * rq));
}

double dwell_time(double a, double theta, double sigma, double theta_m) {
    return std::log1p(a * theta * sigma / ((a * theta + theta_m) * (1.0 - sigma))) / a;
}

DesignConstants design_constants(const GainProfiles& g, const PlantCoefficients& c,
                                 const EtcParams& p) {
    p.validate();
    DesignConstants out;
    out.reflection = std::abs(c.rho * c.q);
    out.mu_upper = mu_upper_bound(c);
    out.mu = p.mu;
    out.delta = p.delta;
    if (!(p.mu > 0.0 && p.mu < out.mu_upper)) {
        throw Error(ErrorCode::MuOutOfRange, "mu = " + std::to_string(p.mu) +
                                                 " outside (0, " + std::to_string(out.mu_upper) +
                                                 ")");
    }

    const std::size_t n = g.grid.n_x;
    const double h = g.grid.dx();
    const double l1 = c.lambda1;
    const double l2 = c.lambda2;

    const auto da = derivative(g.Nalpha, h);
    const auto db = derivative(g.Nbeta, h);
    std::vector<double> sq_a(n), sq_b(n), cross(n);
    for (std::size_t i = 0; i < n; ++i) {
        sq_a[i] = da[i] * da[i];
        sq_b[i] = db[i] * db[i];
        cross[i] = g.Nalpha[i] * g.pbar1[i] + g.Nbeta[i] * g.pbar2[i];
    }
    const double Na_l = g.Nalpha[n - 1];
    const double Nb_l = g.Nbeta[n - 1];
    out.eps[0] = 5.0 * std::max(l1 * l1 * trapezoid(sq_a, h), l2 * l2 * trapezoid(sq_b, h));
    out.eps[1] = 5.0 * std::pow(l1 * Na_l - c.rho * l2 * Nb_l, 2);
    out.eps[2] = 5.0 * std::pow(trapezoid(cross, h) + c.q * l1 * g.Nalpha[0], 2);
    out.eps[3] = 5.0 * std::pow(l2 * Nb_l, 2);

    for (std::size_t i = 0; i < 3; ++i) out.kappa[i] = p.theta * out.eps[i] / (1.0 - p.sigma);
    out.a = 1.0 + out.eps[3] + p.eta;

    const double transit = c.ell / l1 + c.ell / l2;
    out.r = std::min(std::exp(-p.mu * c.ell / l1) / l1, 2.0 * c.q * c.q / l2);
    const double denom = 1.0 - 4.0 * c.rho * c.rho * c.q * c.q * std::exp(p.mu * transit);
    if (!(denom > 0.0)) {
        throw Error(ErrorCode::MuOutOfRange,
                    "1 - 4 rho^2 q^2 exp(mu (l/lambda1 + l/lambda2)) = " + std::to_string(denom));
    }
    out.C_lower = std::max(out.kappa[0] / ((p.mu - p.delta) * out.r), out.kappa[1] / denom);
    if (p.C) {
        out.C = *p.C;
        out.C_below_lower = !(out.C > out.C_lower);
    } else {
        out.C = (1.0 + p.c_margin) * out.C_lower;
    }
    out.D = 2.0 * out.C * c.q * c.q;
    out.theta_m = 2.0 * out.D * std::exp(p.mu * c.ell / l2);
    out.tau = dwell_time(out.a, p.theta, p.sigma, out.theta_m);
    return out;
}

void TriggerState::set_continuous(double U) {
    U_continuous = U;
    d = U_held - U;
}

EventRecord& TriggerState::fire(double t, double gamma_before) {
    U_held = U_continuous;
    d = 0.0;
    EventRecord rec;
    rec.k = events.size();
    rec.t = t;
    rec.dwell = events.empty() ? 0.0 : t - last_event_time;
    rec.U_held = U_held;
    rec.gamma_before = gamma_before;
    last_event_time = t;
    events.push_back(rec);
    return events.back();
}

double m_rate(double m, double d, const DesignConstants& k, const EtcParams& p,
              double norm_target_sq, double alpha_hat_ell_sq, double beta_tilde_0_sq) {
    return -p.eta * m + k.theta_m * d * d - k.kappa[0] * norm_target_sq -
           k.kappa[1] * alpha_hat_ell_sq - k.kappa[2] * beta_tilde_0_sq;
}

void update_m(TriggerState& ts, double dt, const DesignConstants& k, const EtcParams& p,
              double norm_target_sq, double alpha_hat_ell_sq, double beta_tilde_0_sq) {
    ts.m += dt * m_rate(ts.m, ts.d, k, p, norm_target_sq, alpha_hat_ell_sq, beta_tilde_0_sq);
}

double gamma_c(const TriggerState& ts, const DesignConstants&, const EtcParams& p) {
    return p.theta * ts.d * ts.d + ts.m;
}

bool cetc_should_trigger(const TriggerState& ts, const DesignConstants& k, const EtcParams& p) {
    return gamma_c(ts, k, p) > 0.0;
}

}  // namespace hypetc
