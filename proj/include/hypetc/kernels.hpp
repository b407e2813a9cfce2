#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "hypetc/grid.hpp"
#include "hypetc/plant.hpp"

namespace hypetc {

/**
 * The four backstepping kernel systems on 0 <= xi <= x <= ell.
 *
 *  - Controller (K):        observer -> target,  data on xi = x and xi = 0
 *  - Observer (P):          error target -> error, data on xi = x and x = ell
 *  - InverseController (L): target -> observer,  data on xi = x and xi = 0
 *  - InverseObserver (R):   error -> error target, data on xi = x and x = ell
 *
 * Every family shares the transport operators
 *   k11: a1 (d_x + d_xi),   k12: a1 d_x - a2 d_xi,
 *   k21: a2 d_x - a1 d_xi,  k22: a2 (d_x + d_xi)
 * with (a1, a2) = (lambda1, lambda2); only sources and boundary data differ.
 */
enum class KernelFamily { Controller, Observer, InverseController, InverseObserver };

std::string_view to_string(KernelFamily family);

/// True for the families whose k11/k22 edge data sit on xi = 0.
bool has_xi0_edge(KernelFamily family);

struct KernelSet {
    KernelFamily family = KernelFamily::Controller;
    TriangularGrid grid;
    std::array<std::vector<double>, 4> k;  // k11, k12, k21, k22
    std::size_t iterations = 0;
    double last_increment = 0.0;

    double at(std::size_t which, std::size_t i, std::size_t j) const {
        return k[which][grid.index(i, j)];
    }
    double k11(std::size_t i, std::size_t j) const { return at(0, i, j); }
    double k12(std::size_t i, std::size_t j) const { return at(1, i, j); }
    double k21(std::size_t i, std::size_t j) const { return at(2, i, j); }
    double k22(std::size_t i, std::size_t j) const { return at(3, i, j); }

    /// Row x = x_i of kernel (which), i.e. the samples at xi_0..xi_i.
    std::span<const double> row(std::size_t which, std::size_t i) const {
        return {k[which].data() + grid.index(i, 0), i + 1};
    }

    /// Column xi = 0 of kernel (which), one value per x node.
    std::vector<double> xi0_column(std::size_t which) const;

    static KernelSet zeros(KernelFamily family, const TriangularGrid& grid);
};

struct KernelSolverOptions {
    double tol = 1e-8;              // max-norm fixed-point increment
    std::size_t max_iter = 10000;
};

/**
 * Successive approximation along characteristics.
 *
 * Each sweep marches every kernel from its data boundary one grid step at a
 * time: the value at a node is the value at the foot of a one-cell step
 * along the characteristic (linear interpolation when the foot is off-grid,
 * exact data when the step reaches the diagonal) plus the midpoint-rule
 * source integral over the step. Sources use the latest available iterate.
 * Diagonal data are imposed, edge data are refreshed from the coupled
 * kernel every sweep.
 *
 * Throws NonConvergence or InvalidCoefficients.
 */
KernelSet solve_kernels(KernelFamily family, const PlantCoefficients& coeffs,
                        const TriangularGrid& grid, const KernelSolverOptions& options = {});

struct KernelResiduals {
    std::array<double, 4> pde{};  // max |one-sided characteristic residual| per kernel
    double diagonal = 0.0;        // max deviation from the xi = x data
    double edge = 0.0;            // max deviation from the xi = 0 or x = ell relation

    double max() const;
};

/// Evaluates the discrete transport residuals and boundary conditions of a solved set.
KernelResiduals kernel_residuals(const KernelSet& kernels, const PlantCoefficients& coeffs);

/// Piecewise-linear interpolation of triangular-grid samples at (x, xi), xi <= x.
double interpolate(const TriangularGrid& grid, std::span<const double> values, double x,
                   double xi);

/// CSV with columns x, xi, k11, k12, k21, k22 (15 significant digits).
void write_kernels_csv(std::ostream& out, const KernelSet& kernels);

}  // namespace hypetc
