#pragma once

#include <iosfwd>
#include <vector>

#include "hypetc/grid.hpp"
#include "hypetc/kernels.hpp"
#include "hypetc/plant.hpp"

namespace hypetc {

/// Observer injection and feedback gains sampled on the uniform line grid.
struct GainProfiles {
    UniformGrid grid;
    std::vector<double> p1, p2;          // output injection, functions of x
    std::vector<double> pbar1, pbar2;    // injection seen by the observer target system
    std::vector<double> Nu, Nv;          // feedback in observer coordinates, functions of xi
    std::vector<double> Nalpha, Nbeta;   // feedback in target coordinates, functions of xi

    static GainProfiles zeros(const UniformGrid& grid);
};

/**
 * p1 = -lambda2 P^{ab}(x,0), p2 = -lambda2 P^{bb}(x,0);
 * pbar_i = p_i - int_0^x K(x,xi) p(xi) dxi;
 * N^u, N^v from the x = ell row of K, N^alpha, N^beta from the x = ell row of L.
 *
 * Throws GridMismatch when the three kernel sets do not share a grid.
 */
GainProfiles gain_profiles(const KernelSet& K, const KernelSet& P, const KernelSet& L,
                           const PlantCoefficients& coeffs);

/// CSV with columns x, p1, p2, pbar1, pbar2, Nu, Nv, Nalpha, Nbeta.
void write_gains_csv(std::ostream& out, const GainProfiles& gains);

}  // namespace hypetc
