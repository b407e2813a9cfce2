#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hypetc {

/// Uniform nodes x_i = i * dx on [0, ell].
struct UniformGrid {
    std::size_t n_x = 0;
    double ell = 0.0;

    UniformGrid() = default;
    UniformGrid(std::size_t n, double length);

    double dx() const { return ell / static_cast<double>(n_x - 1); }
    double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
    std::vector<double> nodes() const;

    bool operator==(const UniformGrid&) const = default;
};

/**
 * Lower-triangular node set 0 <= xi_j <= x_i <= ell on a uniform mesh.
 *
 * Only the pairs with j <= i are stored, row by row in x.
 */
struct TriangularGrid {
    std::size_t n_x = 0;
    double ell = 0.0;

    TriangularGrid() = default;
    TriangularGrid(std::size_t n, double length);

    double dx() const { return ell / static_cast<double>(n_x - 1); }
    double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
    std::size_t size() const { return n_x * (n_x + 1) / 2; }
    std::size_t index(std::size_t i, std::size_t j) const { return i * (i + 1) / 2 + j; }
    UniformGrid line() const { return UniformGrid(n_x, ell); }

    bool operator==(const TriangularGrid&) const = default;
};

/// Composite trapezoid of uniformly sampled values with spacing h.
double trapezoid(std::span<const double> f, double h);

/// Trapezoid of the first (count) samples of f; zero when count < 2.
double trapezoid_prefix(std::span<const double> f, std::size_t count, double h);

/// Central differences in the interior, one-sided at the two endpoints.
std::vector<double> derivative(std::span<const double> f, double h);

}  // namespace hypetc
