#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "hypetc/gains.hpp"
#include "hypetc/plant.hpp"

namespace hypetc {

struct EtcParams {
    double eta = 0.001;    // [1/s]
    double theta = 1.0;
    double sigma = 0.99;
    double m0 = -1.0;
    double mu = 0.016;     // [1/s]
    double delta = 0.014;  // [1/s]
    std::optional<double> C;  // pinned Lyapunov weight; otherwise (1 + c_margin) * lower bound
    double c_margin = 1.3146;

    /// Throws InvalidArgument when a sign or range condition fails.
    void validate() const;
};

struct DesignConstants {
    std::array<double, 4> eps{};    // eps0..eps3
    std::array<double, 3> kappa{};  // kappa0..kappa2
    double a = 0.0;
    double C = 0.0;
    double C_lower = 0.0;
    bool C_below_lower = false;  // a pinned C that does not exceed the lower bound
    double D = 0.0;
    double r = 0.0;
    double theta_m = 0.0;
    double tau = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    double mu_upper = 0.0;       // admissible mu lies in (0, mu_upper)
    double reflection = 0.0;     // |rho q|
};

/// Upper end of the admissible decay-rate interval; requires |rho q| < 1/2.
double mu_upper_bound(const PlantCoefficients& coeffs);

/// Closed-form minimum dwell-time.
double dwell_time(double a, double theta, double sigma, double theta_m);

/// Throws AssumptionViolated (|rho q| >= 1/2) or MuOutOfRange.
DesignConstants design_constants(const GainProfiles& gains, const PlantCoefficients& coeffs,
                                 const EtcParams& params);

struct EventRecord {
    std::size_t k = 0;
    double t = 0.0;
    double dwell = 0.0;  // t_k - t_{k-1}; zero for the first event
    double U_held = 0.0;
    double gamma_before = 0.0;  // triggering function value that caused the event
    double F = std::numeric_limits<double>::quiet_NaN();
    double G = std::numeric_limits<double>::quiet_NaN();
    double Gbar = std::numeric_limits<double>::quiet_NaN();
};

struct TriggerState {
    double U_held = 0.0;
    double U_continuous = 0.0;
    double d = 0.0;
    double m = -1.0;
    double last_event_time = 0.0;
    std::vector<EventRecord> events;

    explicit TriggerState(double m0 = -1.0) : m(m0) {}

    /// Refreshes U and the holding error d = U_held - U.
    void set_continuous(double U);

    /// Samples the current continuous input; d becomes exactly zero.
    EventRecord& fire(double t, double gamma_before = 0.0);
};

/// Explicit-Euler step of the dynamic variable.
void update_m(TriggerState& ts, double dt, const DesignConstants& consts,
              const EtcParams& params, double norm_target_sq, double alpha_hat_ell_sq,
              double beta_tilde_0_sq);

/// Right-hand side of the dynamic-variable ODE.
double m_rate(double m, double d, const DesignConstants& consts, const EtcParams& params,
              double norm_target_sq, double alpha_hat_ell_sq, double beta_tilde_0_sq);

double gamma_c(const TriggerState& ts, const DesignConstants& consts, const EtcParams& params);

bool cetc_should_trigger(const TriggerState& ts, const DesignConstants& consts,
                         const EtcParams& params);

}  // namespace hypetc
