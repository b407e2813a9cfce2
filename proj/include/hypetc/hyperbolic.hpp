#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hypetc/gains.hpp"
#include "hypetc/grid.hpp"
#include "hypetc/kernels.hpp"
#include "hypetc/plant.hpp"

namespace hypetc {

/// Pair of grid functions on the uniform nodes of [0, ell] at time t.
struct HyperbolicState {
    std::vector<double> u;
    std::vector<double> v;
    double t = 0.0;

    HyperbolicState() = default;
    explicit HyperbolicState(std::size_t n) : u(n, 0.0), v(n, 0.0) {}

    std::size_t size() const { return u.size(); }
    bool finite() const;
};

/// Componentwise a - b (time taken from a).
HyperbolicState difference(const HyperbolicState& a, const HyperbolicState& b);

struct SimConfig {
    double dt = 1e-4;      // [s]
    std::size_t n_x = 201;
    double t_end = 50.0;   // [s]

    /// Throws InvalidArgument or CflViolation.
    void validate(const PlantCoefficients& coeffs) const;
};

/// Throws CflViolation unless dt * max(lambda1, lambda2) <= dx.
void check_cfl(double dt, const PlantCoefficients& coeffs, const UniformGrid& grid);

/**
 * First-order upwind / explicit Euler stepper with cached coefficient samples.
 * Interior nodes are updated first, then u(0) and v(ell) are assigned.
 */
class TransportStepper {
public:
    TransportStepper(const PlantCoefficients& coeffs, const UniformGrid& grid, double dt);

    void step_plant(HyperbolicState& state, double held_input);

    /// v0_now drives the injection; v0_next sets the boundary u_hat(0) = q v(0).
    void step_observer(HyperbolicState& state, double v0_now, double v0_next, double held_input,
                       const GainProfiles& gains);

    /// Error system (plant minus observer): u~(0) = 0, v~(ell) = rho u~(ell), no input.
    void step_error(HyperbolicState& state, const GainProfiles& gains);

    double dt() const { return dt_; }
    const UniformGrid& grid() const { return grid_; }

private:
    void advance(HyperbolicState& state, const std::vector<double>* p1,
                 const std::vector<double>* p2, double injection);

    UniformGrid grid_;
    double dt_;
    double q_;
    double rho_;
    double cu_;  // lambda1 dt / dx
    double cv_;  // lambda2 dt / dx
    std::vector<double> c1_;
    std::vector<double> c2_;
    std::vector<double> scratch_u_;
    std::vector<double> scratch_v_;
};

HyperbolicState step_plant(const HyperbolicState& state, double held_input,
                           const PlantCoefficients& coeffs, double dt);

/// When measurement_v0_next is absent the boundary uses measurement_v0.
HyperbolicState step_observer(const HyperbolicState& state, double measurement_v0,
                              double held_input, const GainProfiles& gains,
                              const PlantCoefficients& coeffs, double dt,
                              std::optional<double> measurement_v0_next = std::nullopt);

/// (u, v) + sign * int_0^x k(x, xi) (u, v)(xi) dxi, trapezoid per node.
HyperbolicState volterra(const HyperbolicState& state, const KernelSet& kernels, double sign);

/// alpha_hat = u_hat - int K (u_hat, v_hat), likewise beta_hat.
HyperbolicState transform_to_target(const HyperbolicState& obs, const KernelSet& K);

/// u_hat = alpha_hat + int L (alpha_hat, beta_hat).
HyperbolicState transform_from_target(const HyperbolicState& target, const KernelSet& L);

/// Error target pair: alpha_tilde = u_tilde + int R (u_tilde, v_tilde).
HyperbolicState error_to_target(const HyperbolicState& error, const KernelSet& R);

/// u_tilde = alpha_tilde - int P (alpha_tilde, beta_tilde).
HyperbolicState error_from_target(const HyperbolicState& target, const KernelSet& P);

/// U = int N^u u_hat + int N^v v_hat.
double control_law(const HyperbolicState& obs, const GainProfiles& gains);

/// Square root of the trapezoid integral of u^2 + v^2 over [0, ell].
double l2_norm(const HyperbolicState& state, double ell);
double l2_norm_sq(const HyperbolicState& state, double ell);

}  // namespace hypetc
