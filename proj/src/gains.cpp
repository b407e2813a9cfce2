#include "hypetc/gains.hpp"

#include <ostream>

#include "hypetc/csv.hpp"
#include "hypetc/error.hpp"

namespace hypetc {

GainProfiles GainProfiles::zeros(const UniformGrid& grid) {
    GainProfiles g;
    g.grid = grid;
    for (auto* p : {&g.p1, &g.p2, &g.pbar1, &g.pbar2, &g.Nu, &g.Nv, &g.Nalpha, &g.Nbeta}) {
        p->assign(grid.n_x, 0.0);
    }
    return g;
}

GainProfiles gain_profiles(const KernelSet& K, const KernelSet& P, const KernelSet& L,
                           const PlantCoefficients& coeffs) {
    if (!(K.grid == P.grid) || !(K.grid == L.grid)) {
        throw Error(ErrorCode::GridMismatch, "kernel sets were solved on different grids");
    }
    if (K.family != KernelFamily::Controller || P.family != KernelFamily::Observer ||
        L.family != KernelFamily::InverseController) {
        throw Error(ErrorCode::InvalidArgument, "gain_profiles expects the K, P and L families");
    }
    const TriangularGrid& tri = K.grid;
    const std::size_t n = tri.n_x;
    const double h = tri.dx();
    GainProfiles g = GainProfiles::zeros(tri.line());

    for (std::size_t i = 0; i < n; ++i) {
        g.p1[i] = -coeffs.lambda2 * P.k12(i, 0);
        g.p2[i] = -coeffs.lambda2 * P.k22(i, 0);
    }

    std::vector<double> f1(n), f2(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            f1[j] = K.k11(i, j) * g.p1[j] + K.k12(i, j) * g.p2[j];
            f2[j] = K.k21(i, j) * g.p1[j] + K.k22(i, j) * g.p2[j];
        }
        g.pbar1[i] = g.p1[i] - trapezoid_prefix(f1, i + 1, h);
        g.pbar2[i] = g.p2[i] - trapezoid_prefix(f2, i + 1, h);
    }

    const std::size_t last = n - 1;
    const double rho = coeffs.rho;
    for (std::size_t j = 0; j < n; ++j) {
        g.Nu[j] = K.k21(last, j) - rho * K.k11(last, j);
        g.Nv[j] = K.k22(last, j) - rho * K.k12(last, j);
        g.Nalpha[j] = L.k21(last, j) - rho * L.k11(last, j);
        g.Nbeta[j] = L.k22(last, j) - rho * L.k12(last, j);
    }
    return g;
}

void write_gains_csv(std::ostream& out, const GainProfiles& g) {
    out << "x,p1,p2,pbar1,pbar2,Nu,Nv,Nalpha,Nbeta\n";
    for (std::size_t i = 0; i < g.grid.n_x; ++i) {
        write_row(out, {g.grid.x(i), g.p1[i], g.p2[i], g.pbar1[i], g.pbar2[i], g.Nu[i], g.Nv[i],
                        g.Nalpha[i], g.Nbeta[i]});
    }
}

}  // namespace hypetc
