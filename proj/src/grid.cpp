#include "hypetc/grid.hpp"

#include <string>

#include "hypetc/error.hpp"

namespace hypetc {

namespace {

void check_grid(std::size_t n, double length) {
    if (n < 3) {
        throw Error(ErrorCode::InvalidArgument,
                    "grid needs at least 3 nodes, got " + std::to_string(n));
    }
    if (!(length > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "grid length must be positive");
    }
}

}  // namespace

UniformGrid::UniformGrid(std::size_t n, double length) : n_x(n), ell(length) {
    check_grid(n, length);
}

std::vector<double> UniformGrid::nodes() const {
    std::vector<double> out(n_x);
    for (std::size_t i = 0; i < n_x; ++i) out[i] = x(i);
    return out;
}

TriangularGrid::TriangularGrid(std::size_t n, double length) : n_x(n), ell(length) {
    check_grid(n, length);
}

double trapezoid(std::span<const double> f, double h) {
    return trapezoid_prefix(f, f.size(), h);
}

double trapezoid_prefix(std::span<const double> f, std::size_t count, double h) {
    if (count < 2) return 0.0;
    double sum = 0.5 * (f[0] + f[count - 1]);
    for (std::size_t i = 1; i + 1 < count; ++i) sum += f[i];
    return sum * h;
}

std::vector<double> derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    out[0] = (f[1] - f[0]) / h;
    out[n - 1] = (f[n - 1] - f[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    return out;
}

}  // namespace hypetc
