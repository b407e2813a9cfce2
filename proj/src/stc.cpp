#include "hypetc/stc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hypetc/error.hpp"

namespace hypetc {

StcConstants stc_constants(const GainProfiles& g, const KernelSet& R, const PlantCoefficients& c,
                           double delta_bar, double phi_u, double phi_v) {
    if (!(delta_bar > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta_bar must be positive");
    if (!(phi_u >= 0.0) || !(phi_v >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "initial-error bounds must be nonnegative");
    }
    if (R.family != KernelFamily::InverseObserver) {
        throw Error(ErrorCode::InvalidArgument, "stc_constants expects the R family");
    }
    if (R.grid.n_x != g.grid.n_x) throw Error(ErrorCode::GridMismatch, "R and gain grids differ");
    c.validate();

    StcConstants sc;
    sc.delta_bar = delta_bar;
    sc.phi_u = phi_u;
    sc.phi_v = phi_v;
    const double l1 = c.lambda1;
    const double l2 = c.lambda2;
    const double rq = std::abs(c.q * c.rho);
    sc.mu_bar = 2.0 * l1 * l2 / (c.ell * (l1 + l2)) * std::log(1.0 / (2.0 * rq));
    if (!(sc.mu_bar > 0.0)) {
        throw Error(ErrorCode::MuBarNonpositive,
                    "mu_bar = " + std::to_string(sc.mu_bar) + " (|q rho| = " +
                        std::to_string(rq) + ")");
    }
    sc.C_bar = 1.0;
    sc.D_bar = 2.0 * c.q * c.q;
    sc.transit = c.ell / l1 + c.ell / l2;

    const std::size_t n = g.grid.n_x;
    const double h = g.grid.dx();
    std::vector<double> w(n), na(n), nb(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.grid.x(i);
        w[i] = sc.C_bar / l1 * std::exp(-sc.mu_bar * x / l1) * g.pbar1[i] * g.pbar1[i] +
               sc.D_bar / l2 * std::exp(sc.mu_bar * x / l2) * g.pbar2[i] * g.pbar2[i];
        na[i] = g.Nalpha[i] * g.Nalpha[i];
        nb[i] = g.Nbeta[i] * g.Nbeta[i];
    }
    sc.P_V2 = delta_bar * trapezoid(w, h);
    sc.varrho = delta_bar - sc.mu_bar + 2.0 * sc.D_bar * std::exp(sc.mu_bar * c.ell / l2);
    if (!(sc.varrho > 0.0)) {
        throw Error(ErrorCode::VarrhoNotPositive, "varrho = " + std::to_string(sc.varrho));
    }
    const double denom =
        std::min(sc.C_bar * std::exp(-sc.mu_bar * c.ell / l1) / l1, sc.D_bar / l2);
    sc.r_d = 4.0 * std::max(trapezoid(na, h), trapezoid(nb, h)) / denom;

    std::vector<double> buf(n);
    double best_a = 0.0;
    double best_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = R.grid.x(i);
        auto energy = [&](std::size_t which) {
            const auto row = R.row(which, i);
            for (std::size_t j = 0; j <= i; ++j) buf[j] = row[j] * row[j];
            return trapezoid_prefix(buf, i + 1, h);
        };
        const double a = phi_u + phi_u * x * energy(0) + phi_v * x * energy(1);
        const double b = phi_v + phi_u * x * energy(2) + phi_v * x * energy(3);
        best_a = std::max(best_a, a);
        best_b = std::max(best_b, b);
    }
    sc.phi_alpha = 3.0 * best_a;
    sc.phi_beta = 3.0 * best_b;
    return sc;
}

double vbar2(const HyperbolicState& s, const StcConstants& sc, const PlantCoefficients& c) {
    const std::size_t n = s.size();
    if (n < 2) return 0.0;
    const double h = c.ell / static_cast<double>(n - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * h;
        const double f = sc.C_bar / c.lambda1 * std::exp(-sc.mu_bar * x / c.lambda1) * s.u[i] * s.u[i] +
                         sc.D_bar / c.lambda2 * std::exp(sc.mu_bar * x / c.lambda2) * s.v[i] * s.v[i];
        sum += (i == 0 || i + 1 == n) ? 0.5 * f : f;
    }
    return sum * h;
}

double phi0(double t, const StcConstants& sc, const PlantCoefficients& c) {
    if (t <= sc.transit) return std::max(c.rho * c.rho * sc.phi_alpha, sc.phi_beta);
    return 0.0;
}

double calF(double t, double v2, const StcConstants& sc, const PlantCoefficients& c) {
    const double phi = (2.0 * sc.C_bar * c.q * c.q + sc.P_V2) * phi0(t, sc, c);
    const double growth = 2.0 * sc.r_d * sc.D_bar * std::exp(sc.mu_bar * c.ell / c.lambda2);
    return sc.r_d * (2.0 * v2 + (growth * v2 + phi) / sc.varrho);
}

GapResult next_event_gap(double m_k, double F_k, const DesignConstants& k, const EtcParams& p,
                         const StcConstants& sc, const StcOptions& options) {
    if (!(m_k < 0.0)) {
        throw Error(ErrorCode::NonNegativeM, "m = " + std::to_string(m_k) + " at an STC event");
    }
    GapResult out;
    if (F_k <= options.F_floor) {
        out.G = std::max(k.tau, options.G_max_factor * k.tau);
        out.Gbar = std::numeric_limits<double>::quiet_NaN();
        out.capped = true;
        return out;
    }
    const double s = sc.varrho + p.eta;
    const double num = k.theta_m * F_k - m_k * s;
    const double den = F_k * (p.theta * s + k.theta_m);
    out.Gbar = std::log(num / den) / s;
    out.G = std::max(k.tau, out.Gbar);
    return out;
}

}  // namespace hypetc
