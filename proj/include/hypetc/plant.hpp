#pragma once

#include <functional>
#include <vector>

#include "hypetc/grid.hpp"

namespace hypetc {

/**
 * Coefficients of the canonical 2x2 system
 *
 *   u_t = -lambda1 u_x + c1(x) v,   u(0) = q v(0)
 *   v_t =  lambda2 v_x + c2(x) u,   v(ell) = rho u(ell) + U
 */
struct PlantCoefficients {
    double lambda1 = 1.0;  // [m/s]
    double lambda2 = 1.0;  // [m/s]
    std::function<double(double)> c1 = [](double) { return 0.0; };  // [1/s]
    std::function<double(double)> c2 = [](double) { return 0.0; };  // [1/s]
    double q = 1.0;    // distal reflection
    double rho = 1.0;  // proximal reflection
    double ell = 1.0;  // [m]

    /// Throws InvalidCoefficients when a scalar invariant fails.
    void validate() const;

    /// Throws InvalidCoefficients when c1 or c2 is non-finite on a grid node.
    void validate_on(const UniformGrid& grid) const;

    std::vector<double> sample_c1(const UniformGrid& grid) const;
    std::vector<double> sample_c2(const UniformGrid& grid) const;

    static PlantCoefficients constant(double lambda1, double lambda2, double c1, double c2,
                                      double q, double rho, double ell);
};

}  // namespace hypetc
