#include "hypetc/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hypetc/error.hpp"

namespace hypetc {

bool HyperbolicState::finite() const {
    auto ok = [](double x) { return std::isfinite(x); };
    return u.size() == v.size() && std::all_of(u.begin(), u.end(), ok) &&
           std::all_of(v.begin(), v.end(), ok);
}

HyperbolicState difference(const HyperbolicState& a, const HyperbolicState& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::GridMismatch, "state sizes differ");
    HyperbolicState out(a.size());
    out.t = a.t;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.u[i] = a.u[i] - b.u[i];
        out.v[i] = a.v[i] - b.v[i];
    }
    return out;
}

void check_cfl(double dt, const PlantCoefficients& coeffs, const UniformGrid& grid) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
    const double speed = std::max(coeffs.lambda1, coeffs.lambda2);
    // Small relative slack so that dt = dx / speed itself is accepted.
    if (dt * speed > grid.dx() * (1.0 + 1e-12)) {
        throw Error(ErrorCode::CflViolation,
                    "dt * max(lambda) = " + std::to_string(dt * speed) +
                        " exceeds dx = " + std::to_string(grid.dx()));
    }
}

void SimConfig::validate(const PlantCoefficients& coeffs) const {
    if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
    check_cfl(dt, coeffs, UniformGrid(n_x, coeffs.ell));
}

TransportStepper::TransportStepper(const PlantCoefficients& coeffs, const UniformGrid& grid,
                                   double dt)
    : grid_(grid),
      dt_(dt),
      q_(coeffs.q),
      rho_(coeffs.rho),
      cu_(coeffs.lambda1 * dt / grid.dx()),
      cv_(coeffs.lambda2 * dt / grid.dx()),
      c1_(coeffs.sample_c1(grid)),
      c2_(coeffs.sample_c2(grid)),
      scratch_u_(grid.n_x),
      scratch_v_(grid.n_x) {
    check_cfl(dt, coeffs, grid);
}

void TransportStepper::advance(HyperbolicState& s, const std::vector<double>* p1,
                               const std::vector<double>* p2, double injection) {
    const std::size_t n = grid_.n_x;
    if (s.size() != n || s.v.size() != n) {
        throw Error(ErrorCode::GridMismatch, "state does not match the stepper grid");
    }
    auto& nu = scratch_u_;
    auto& nv = scratch_v_;
    for (std::size_t i = 1; i < n; ++i) {
        nu[i] = s.u[i] - cu_ * (s.u[i] - s.u[i - 1]) + dt_ * c1_[i] * s.v[i];
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        nv[i] = s.v[i] + cv_ * (s.v[i + 1] - s.v[i]) + dt_ * c2_[i] * s.u[i];
    }
    if (p1 != nullptr) {
        const double w = dt_ * injection;
        for (std::size_t i = 1; i < n; ++i) nu[i] += w * (*p1)[i];
        for (std::size_t i = 0; i + 1 < n; ++i) nv[i] += w * (*p2)[i];
    }
    std::swap(s.u, nu);
    std::swap(s.v, nv);
    s.t += dt_;
}

void TransportStepper::step_plant(HyperbolicState& s, double held_input) {
    advance(s, nullptr, nullptr, 0.0);
    const std::size_t last = grid_.n_x - 1;
    s.u[0] = q_ * s.v[0];
    s.v[last] = rho_ * s.u[last] + held_input;
}

void TransportStepper::step_observer(HyperbolicState& s, double v0_now, double v0_next,
                                     double held_input, const GainProfiles& gains) {
    if (gains.p1.size() != grid_.n_x) {
        throw Error(ErrorCode::GridMismatch, "gain profiles do not match the stepper grid");
    }
    const double innovation = v0_now - s.v[0];
    advance(s, &gains.p1, &gains.p2, innovation);
    const std::size_t last = grid_.n_x - 1;
    s.u[0] = q_ * v0_next;
    s.v[last] = rho_ * s.u[last] + held_input;
}

void TransportStepper::step_error(HyperbolicState& s, const GainProfiles& gains) {
    if (gains.p1.size() != grid_.n_x) {
        throw Error(ErrorCode::GridMismatch, "gain profiles do not match the stepper grid");
    }
    advance(s, &gains.p1, &gains.p2, -s.v[0]);
    const std::size_t last = grid_.n_x - 1;
    s.u[0] = 0.0;
    s.v[last] = rho_ * s.u[last];
}

HyperbolicState step_plant(const HyperbolicState& state, double held_input,
                           const PlantCoefficients& coeffs, double dt) {
    TransportStepper stepper(coeffs, UniformGrid(state.size(), coeffs.ell), dt);
    HyperbolicState out = state;
    stepper.step_plant(out, held_input);
    return out;
}

HyperbolicState step_observer(const HyperbolicState& state, double measurement_v0,
                              double held_input, const GainProfiles& gains,
                              const PlantCoefficients& coeffs, double dt,
                              std::optional<double> measurement_v0_next) {
    TransportStepper stepper(coeffs, UniformGrid(state.size(), coeffs.ell), dt);
    HyperbolicState out = state;
    stepper.step_observer(out, measurement_v0, measurement_v0_next.value_or(measurement_v0),
                          held_input, gains);
    return out;
}

HyperbolicState volterra(const HyperbolicState& s, const KernelSet& k, double sign) {
    const std::size_t n = k.grid.n_x;
    if (s.size() != n || s.v.size() != n) {
        throw Error(ErrorCode::GridMismatch, "state and kernel grids differ");
    }
    const double h = k.grid.dx();
    HyperbolicState out(n);
    out.t = s.t;
    out.u[0] = s.u[0];
    out.v[0] = s.v[0];
    for (std::size_t i = 1; i < n; ++i) {
        const auto k11 = k.row(0, i);
        const auto k12 = k.row(1, i);
        const auto k21 = k.row(2, i);
        const auto k22 = k.row(3, i);
        auto term = [&](std::size_t j, double& a, double& b) {
            a = k11[j] * s.u[j] + k12[j] * s.v[j];
            b = k21[j] * s.u[j] + k22[j] * s.v[j];
        };
        double a0, b0, ai, bi;
        term(0, a0, b0);
        term(i, ai, bi);
        double ia = 0.5 * (a0 + ai);
        double ib = 0.5 * (b0 + bi);
        for (std::size_t j = 1; j < i; ++j) {
            double a, b;
            term(j, a, b);
            ia += a;
            ib += b;
        }
        out.u[i] = s.u[i] + sign * h * ia;
        out.v[i] = s.v[i] + sign * h * ib;
    }
    return out;
}

namespace {

void expect_family(const KernelSet& k, KernelFamily family) {
    if (k.family != family) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("expected kernel family ") + std::string(to_string(family)) +
                        ", got " + std::string(to_string(k.family)));
    }
}

}  // namespace

HyperbolicState transform_to_target(const HyperbolicState& obs, const KernelSet& K) {
    expect_family(K, KernelFamily::Controller);
    return volterra(obs, K, -1.0);
}

HyperbolicState transform_from_target(const HyperbolicState& target, const KernelSet& L) {
    expect_family(L, KernelFamily::InverseController);
    return volterra(target, L, 1.0);
}

HyperbolicState error_to_target(const HyperbolicState& error, const KernelSet& R) {
    expect_family(R, KernelFamily::InverseObserver);
    return volterra(error, R, 1.0);
}

HyperbolicState error_from_target(const HyperbolicState& target, const KernelSet& P) {
    expect_family(P, KernelFamily::Observer);
    return volterra(target, P, -1.0);
}

double control_law(const HyperbolicState& obs, const GainProfiles& gains) {
    const std::size_t n = gains.grid.n_x;
    if (obs.size() != n || obs.v.size() != n) {
        throw Error(ErrorCode::GridMismatch, "observer state and gain grids differ");
    }
    double sum = 0.5 * (gains.Nu[0] * obs.u[0] + gains.Nv[0] * obs.v[0] +
                        gains.Nu[n - 1] * obs.u[n - 1] + gains.Nv[n - 1] * obs.v[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) sum += gains.Nu[i] * obs.u[i] + gains.Nv[i] * obs.v[i];
    return sum * gains.grid.dx();
}

double l2_norm_sq(const HyperbolicState& s, double ell) {
    const std::size_t n = s.size();
    if (n < 2) return 0.0;
    auto sq = [&](std::size_t i) { return s.u[i] * s.u[i] + s.v[i] * s.v[i]; };
    double sum = 0.5 * (sq(0) + sq(n - 1));
    for (std::size_t i = 1; i + 1 < n; ++i) sum += sq(i);
    return sum * ell / static_cast<double>(n - 1);
}

double l2_norm(const HyperbolicState& s, double ell) { return std::sqrt(l2_norm_sq(s, ell)); }

}  // namespace hypetc
