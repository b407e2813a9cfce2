#include "hypetc/saint_venant.hpp"

#include <cmath>
#include <string>

#include "hypetc/error.hpp"

namespace hypetc {

double LinearizedModel::reflection_product() const { return std::abs(plant.rho * plant.q); }

LinearizedModel linearize(const CanalConfig& cfg) {
    if (!(cfg.g > 0.0) || !(cfg.ell > 0.0) || !(cfg.H_eq > 0.0) || !(cfg.V_eq > 0.0) ||
        !(cfg.k_G > 0.0) || cfg.Cf < 0.0) {
        throw Error(ErrorCode::InvalidConfig, "canal parameters must be positive");
    }
    if (!(cfg.H_ell > 0.0) || !(cfg.H_eq > cfg.H_ell)) {
        throw Error(ErrorCode::InvalidConfig, "gate level must satisfy 0 < H_ell < H_eq");
    }
    if (!(cfg.g * cfg.H_eq > cfg.V_eq * cfg.V_eq)) {
        throw Error(ErrorCode::SupercriticalFlow,
                    "subcritical condition g*H_eq > V_eq^2 does not hold");
    }
    if (cfg.S_b) {
        const double expected = cfg.bottom_slope();
        const double scale = std::max(std::abs(expected), 1e-300);
        if (std::abs(*cfg.S_b - expected) > 1e-12 * scale) {
            throw Error(ErrorCode::SlopeMismatch,
                        "bottom slope " + std::to_string(*cfg.S_b) +
                            " differs from Cf*V_eq^2/(g*H_eq) = " + std::to_string(expected));
        }
    }

    LinearizedModel m;
    m.H_eq = cfg.H_eq;
    m.V_eq = cfg.V_eq;
    m.g = cfg.g;
    const double c = std::sqrt(cfg.g * cfg.H_eq);
    const double l1 = cfg.V_eq + c;
    const double l2 = c - cfg.V_eq;
    m.f_H = -cfg.Cf * cfg.V_eq * cfg.V_eq / (cfg.H_eq * cfg.H_eq);
    m.f_V = 2.0 * cfg.Cf * cfg.V_eq / cfg.H_eq;
    const double s = std::sqrt(cfg.H_eq / cfg.g);
    m.gamma1 = 0.5 * m.f_H * s + 0.5 * m.f_V;
    m.gamma2 = -0.5 * m.f_H * s + 0.5 * m.f_V;

    const double Q0 = cfg.Q0();
    const double drop = cfg.H_eq - cfg.H_ell;
    m.q_tilde = -l2 / l1;
    m.rho_tilde = (Q0 - 2.0 * l1 * drop) / (Q0 + 2.0 * l2 * drop);
    m.rho_u = 4.0 * std::sqrt(2.0) * cfg.g * cfg.k_G * std::pow(drop, 1.5) /
              (std::sqrt(cfg.H_eq) * (Q0 + 2.0 * l2 * drop));
    m.U_eq = Q0 / (cfg.k_G * std::sqrt(2.0 * cfg.g * drop));

    const double decay = m.gamma1 / l1 + m.gamma2 / l2;
    const double g1 = m.gamma1;
    const double g2 = m.gamma2;
    m.plant.lambda1 = l1;
    m.plant.lambda2 = l2;
    m.plant.c1 = [g2, decay](double x) { return -g2 * std::exp(decay * x); };
    m.plant.c2 = [g1, decay](double x) { return -g1 * std::exp(-decay * x); };
    m.plant.q = m.q_tilde;
    m.plant.rho = m.rho_tilde * std::exp(-decay * cfg.ell);
    m.plant.ell = cfg.ell;
    return m;
}

HyperbolicState to_characteristic(std::span<const double> H_dev, std::span<const double> V_dev,
                                  const LinearizedModel& model) {
    if (H_dev.size() != V_dev.size() || H_dev.size() < 3) {
        throw Error(ErrorCode::GridMismatch, "depth and velocity profiles differ in length");
    }
    const auto& p = model.plant;
    const UniformGrid grid(H_dev.size(), p.ell);
    const double w = std::sqrt(model.g / model.H_eq);
    HyperbolicState out(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        const double x = grid.x(i);
        const double xi1 = w * H_dev[i] + V_dev[i];
        const double xi2 = -w * H_dev[i] + V_dev[i];
        out.u[i] = std::exp(model.gamma1 * x / p.lambda1) * xi1;
        out.v[i] = std::exp(-model.gamma2 * x / p.lambda2) * xi2;
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> from_characteristic(
    const HyperbolicState& state, const LinearizedModel& model) {
    const auto& p = model.plant;
    const UniformGrid grid(state.size(), p.ell);
    const double w = std::sqrt(model.g / model.H_eq);
    std::vector<double> H(grid.n_x);
    std::vector<double> V(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        const double x = grid.x(i);
        const double xi1 = std::exp(-model.gamma1 * x / p.lambda1) * state.u[i];
        const double xi2 = std::exp(model.gamma2 * x / p.lambda2) * state.v[i];
        H[i] = model.H_eq + (xi1 - xi2) / (2.0 * w);
        V[i] = model.V_eq + 0.5 * (xi1 + xi2);
    }
    return {std::move(H), std::move(V)};
}

GateOpening gate_opening(double U_canonical, double H_at_ell, const LinearizedModel& model,
                         const CanalConfig& cfg) {
    if (!(H_at_ell > cfg.H_ell)) {
        throw Error(ErrorCode::GateSubmerged,
                    "depth at the gate " + std::to_string(H_at_ell) +
                        " does not exceed the downstream level");
    }
    const double U_tilde = U_canonical * std::exp(model.gamma2 * cfg.ell / model.plant.lambda2);
    const double opening = model.U_eq + U_tilde / model.rho_u;
    if (opening < 0.0) return {0.0, true};
    return {opening, false};
}

}  // namespace hypetc
