#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hypetc/hyperbolic.hpp"
#include "hypetc/plant.hpp"

namespace hypetc {

/// Physical canal with an upstream constant inflow and a downstream sluice gate.
struct CanalConfig {
    double g = 9.81;     // [m/s^2]
    double ell = 10.0;   // canal length [m]
    double Cf = 0.2;     // friction coefficient
    double H_eq = 2.0;   // equilibrium depth [m]
    double V_eq = 1.0;   // equilibrium velocity [m/s]
    double H_ell = 0.1;  // water level beyond the gate [m]
    double k_G = 0.6;    // gate discharge coefficient
    std::optional<double> S_b;  // bottom slope; derived from the others when absent

    double Q0() const { return H_eq * V_eq; }
    double bottom_slope() const { return Cf * V_eq * V_eq / (g * H_eq); }
};

/// Linearized Saint-Venant model in characteristic coordinates.
struct LinearizedModel {
    PlantCoefficients plant;
    double f_H = 0.0;
    double f_V = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double q_tilde = 0.0;
    double rho_tilde = 0.0;
    double rho_u = 0.0;
    double U_eq = 0.0;  // equilibrium gate opening [m]
    double H_eq = 0.0;
    double V_eq = 0.0;
    double g = 0.0;

    /// |rho q|, to be compared against 1/2.
    double reflection_product() const;
};

/// Throws SupercriticalFlow, SlopeMismatch or InvalidConfig.
LinearizedModel linearize(const CanalConfig& cfg);

/// Deviations (H - H_eq, V - V_eq) to the scaled characteristic pair (u, v).
HyperbolicState to_characteristic(std::span<const double> H_dev, std::span<const double> V_dev,
                                  const LinearizedModel& model);

/// Inverse of to_characteristic; returns absolute depth and velocity.
std::pair<std::vector<double>, std::vector<double>> from_characteristic(
    const HyperbolicState& state, const LinearizedModel& model);

struct GateOpening {
    double opening = 0.0;  // U_ell [m], clamped at zero
    bool clamped = false;
};

/// Physical gate opening realizing a canonical boundary input. Throws GateSubmerged.
GateOpening gate_opening(double U_canonical, double H_at_ell, const LinearizedModel& model,
                         const CanalConfig& cfg);

}  // namespace hypetc
