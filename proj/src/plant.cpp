#include "hypetc/plant.hpp"

#include <cmath>
#include <string>

#include "hypetc/error.hpp"

namespace hypetc {

void PlantCoefficients::validate() const {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) {
        throw Error(ErrorCode::InvalidCoefficients, "transport speeds must be positive");
    }
    if (q == 0.0 || !std::isfinite(q)) {
        throw Error(ErrorCode::InvalidCoefficients, "distal reflection q must be finite and nonzero");
    }
    if (rho == 0.0 || !std::isfinite(rho)) {
        throw Error(ErrorCode::InvalidCoefficients,
                    "proximal reflection rho must be finite and nonzero");
    }
    if (!(ell > 0.0) || !std::isfinite(ell)) {
        throw Error(ErrorCode::InvalidCoefficients, "domain length must be positive");
    }
    if (!c1 || !c2) {
        throw Error(ErrorCode::InvalidCoefficients, "coupling coefficients are not set");
    }
}

void PlantCoefficients::validate_on(const UniformGrid& grid) const {
    validate();
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        const double x = grid.x(i);
        if (!std::isfinite(c1(x)) || !std::isfinite(c2(x))) {
            throw Error(ErrorCode::InvalidCoefficients,
                        "non-finite coupling coefficient at x = " + std::to_string(x));
        }
    }
}

std::vector<double> PlantCoefficients::sample_c1(const UniformGrid& grid) const {
    std::vector<double> out(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) out[i] = c1(grid.x(i));
    return out;
}

std::vector<double> PlantCoefficients::sample_c2(const UniformGrid& grid) const {
    std::vector<double> out(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) out[i] = c2(grid.x(i));
    return out;
}

PlantCoefficients PlantCoefficients::constant(double lambda1, double lambda2, double c1,
                                              double c2, double q, double rho, double ell) {
    PlantCoefficients out;
    out.lambda1 = lambda1;
    out.lambda2 = lambda2;
    out.c1 = [c1](double) { return c1; };
    out.c2 = [c2](double) { return c2; };
    out.q = q;
    out.rho = rho;
    out.ell = ell;
    return out;
}

}  // namespace hypetc
