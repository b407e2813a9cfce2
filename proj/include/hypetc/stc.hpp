#pragma once

#include "hypetc/gains.hpp"
#include "hypetc/hyperbolic.hpp"
#include "hypetc/kernels.hpp"
#include "hypetc/plant.hpp"
#include "hypetc/trigger.hpp"

namespace hypetc {

struct StcConstants {
    double mu_bar = 0.0;
    double delta_bar = 0.0;
    double C_bar = 1.0;
    double D_bar = 0.0;
    double P_V2 = 0.0;
    double varrho = 0.0;
    double r_d = 0.0;
    double phi_alpha = 0.0;
    double phi_beta = 0.0;
    double phi_u = 0.0;
    double phi_v = 0.0;
    double transit = 0.0;  // ell/lambda1 + ell/lambda2
};

struct StcOptions {
    double F_floor = 1e-12;
    double G_max_factor = 10.0;  // cap G_max = factor * tau when F <= F_floor
};

/// Throws MuBarNonpositive, VarrhoNotPositive, InvalidArgument or GridMismatch.
StcConstants stc_constants(const GainProfiles& gains, const KernelSet& R,
                           const PlantCoefficients& coeffs, double delta_bar, double phi_u,
                           double phi_v);

/// Weighted target-state energy.
double vbar2(const HyperbolicState& target, const StcConstants& sc,
             const PlantCoefficients& coeffs);

/// Piecewise initial-error bound; inclusive at the cutoff.
double phi0(double t, const StcConstants& sc, const PlantCoefficients& coeffs);

double calF(double t, double vbar2_value, const StcConstants& sc,
            const PlantCoefficients& coeffs);

struct GapResult {
    double G = 0.0;
    double Gbar = 0.0;  // NaN when F is below the floor
    bool capped = false;
};

/// G = max(tau, Gbar). Throws NonNegativeM.
GapResult next_event_gap(double m_k, double F_k, const DesignConstants& consts,
                         const EtcParams& params, const StcConstants& sc,
                         const StcOptions& options = {});

}  // namespace hypetc
