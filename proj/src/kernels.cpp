#include "hypetc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "hypetc/csv.hpp"
#include "hypetc/error.hpp"

namespace hypetc {

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::Controller: return "K";
        case KernelFamily::Observer: return "P";
        case KernelFamily::InverseController: return "L";
        case KernelFamily::InverseObserver: return "R";
    }
    return "?";
}

bool has_xi0_edge(KernelFamily family) {
    return family == KernelFamily::Controller || family == KernelFamily::InverseController;
}

std::vector<double> KernelSet::xi0_column(std::size_t which) const {
    std::vector<double> out(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) out[i] = at(which, i, 0);
    return out;
}

KernelSet KernelSet::zeros(KernelFamily family, const TriangularGrid& grid) {
    KernelSet out;
    out.family = family;
    out.grid = grid;
    for (auto& kk : out.k) kk.assign(grid.size(), 0.0);
    return out;
}

double interpolate(const TriangularGrid& grid, std::span<const double> values, double x,
                   double xi) {
    const double h = grid.dx();
    const std::size_t last = grid.n_x - 1;
    double sx = std::clamp(x / h, 0.0, static_cast<double>(last));
    double sy = std::clamp(xi / h, 0.0, sx);

    std::size_t i = std::min(static_cast<std::size_t>(sx), last - 1);
    double fx = sx - static_cast<double>(i);
    std::size_t j = std::min(static_cast<std::size_t>(sy), i);
    double fy = sy - static_cast<double>(j);

    auto v = [&](std::size_t a, std::size_t b) { return values[grid.index(a, b)]; };
    if (j < i) {
        return (1.0 - fx) * (1.0 - fy) * v(i, j) + fx * (1.0 - fy) * v(i + 1, j) +
               (1.0 - fx) * fy * v(i, j + 1) + fx * fy * v(i + 1, j + 1);
    }
    // Cell on the diagonal: only the lower triangle (i,i), (i+1,i), (i+1,i+1) exists.
    fy = std::min(fy, fx);
    return (1.0 - fx) * v(i, i) + (fx - fy) * v(i + 1, i) + fy * v(i + 1, i + 1);
}

namespace {

/// Boundary data, sources and couplings that distinguish the four families.
struct FamilyRules {
    KernelFamily family;
    const PlantCoefficients& c;
    double sum_speeds;

    FamilyRules(KernelFamily f, const PlantCoefficients& coeffs)
        : family(f), c(coeffs), sum_speeds(coeffs.lambda1 + coeffs.lambda2) {}

    bool controller_like() const { return has_xi0_edge(family); }

    /// K and R take their coefficients at xi, P and L at x.
    bool source_at_xi() const {
        return family == KernelFamily::Controller || family == KernelFamily::InverseObserver;
    }

    /// Speeds (a_x, a_xi) of the operator a_x d_x + a_xi d_xi applied to kernel m.
    std::pair<double, double> speeds(std::size_t m) const {
        switch (m) {
            case 0: return {c.lambda1, c.lambda1};
            case 1: return {c.lambda1, -c.lambda2};
            case 2: return {c.lambda2, -c.lambda1};
            default: return {c.lambda2, c.lambda2};
        }
    }

    /// Kernel that feeds the source of kernel m.
    std::size_t source_kernel(std::size_t m) const {
        static constexpr std::size_t controller_src[4] = {1, 0, 3, 2};
        static constexpr std::size_t observer_src[4] = {2, 3, 0, 1};
        return source_at_xi() ? controller_src[m] : observer_src[m];
    }

    double source_coefficient(std::size_t m, double x, double xi) const {
        if (source_at_xi()) {
            switch (m) {
                case 0: return -c.c2(xi);
                case 1: return -c.c1(xi);
                case 2: return c.c2(xi);
                default: return c.c1(xi);
            }
        }
        switch (m) {
            case 0: return c.c1(x);
            case 1: return c.c1(x);
            case 2: return -c.c2(x);
            default: return -c.c2(x);
        }
    }

    /// Imposed value of k12 (m = 1) or k21 (m = 2) on xi = x.
    double diagonal(std::size_t m, double x) const {
        const double sign = controller_like() ? 1.0 : -1.0;
        if (m == 1) return sign * c.c1(x) / sum_speeds;
        return -sign * c.c2(x) / sum_speeds;
    }

    /// Edge value of k11 (m = 0) or k22 (m = 3) from the cross kernels at the same node.
    double edge(std::size_t m, double k12, double k21) const {
        if (controller_like()) {
            if (m == 0) return c.lambda2 / (c.q * c.lambda1) * k12;
            return c.q * c.lambda1 / c.lambda2 * k21;
        }
        if (m == 0) return k21 / c.rho;
        return c.rho * k12;
    }
};

/// Foot of a one-cell step back along the characteristic of a cross kernel.
struct CrossStep {
    double s;       // parameter length of the step
    double foot_x;
    double foot_xi;
    bool on_diagonal;
};

CrossStep cross_step(double x, double xi, double ax, double axi_abs, double h) {
    const double s_full = h / ax;
    const double s_diag = (x - xi) / (ax + axi_abs);
    if (s_diag <= s_full) {
        const double z = x - s_diag * ax;
        return {s_diag, z, z, true};
    }
    return {s_full, x - h, xi + s_full * axi_abs, false};
}

/// Linear interpolation along the column of nodes x = x_i.
double column_value(const TriangularGrid& grid, std::span<const double> values, std::size_t i,
                    double xi) {
    const double s = std::clamp(xi / grid.dx(), 0.0, static_cast<double>(i));
    std::size_t j = std::min(static_cast<std::size_t>(s), i == 0 ? 0 : i - 1);
    if (i == 0) return values[grid.index(0, 0)];
    const double f = s - static_cast<double>(j);
    return (1.0 - f) * values[grid.index(i, j)] + f * values[grid.index(i, j + 1)];
}

double step_source(const FamilyRules& rules, const KernelSet& set, std::size_t m, double mx,
                   double mxi) {
    const auto& src = set.k[rules.source_kernel(m)];
    return rules.source_coefficient(m, mx, mxi) * interpolate(set.grid, src, mx, mxi);
}

void sweep_cross(const FamilyRules& rules, KernelSet& set, std::size_t m) {
    const auto& grid = set.grid;
    const double h = grid.dx();
    const auto [ax, axi] = rules.speeds(m);
    auto& out = set.k[m];
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        const double x = grid.x(i);
        for (std::size_t j = 0; j <= i; ++j) {
            const double xi = grid.x(j);
            if (j == i) {
                out[grid.index(i, j)] = rules.diagonal(m, x);
                continue;
            }
            const CrossStep st = cross_step(x, xi, ax, -axi, h);
            const double foot = st.on_diagonal ? rules.diagonal(m, st.foot_x)
                                               : column_value(grid, out, i - 1, st.foot_xi);
            const double mx = 0.5 * (x + st.foot_x);
            const double mxi = 0.5 * (xi + st.foot_xi);
            out[grid.index(i, j)] = foot + st.s * step_source(rules, set, m, mx, mxi);
        }
    }
}

void sweep_diagonal_pair(const FamilyRules& rules, KernelSet& set, std::size_t m) {
    const auto& grid = set.grid;
    const std::size_t n = grid.n_x;
    const double h = grid.dx();
    const double a = rules.speeds(m).first;
    const double s = h / a;
    auto& out = set.k[m];

    if (rules.controller_like()) {
        for (std::size_t i = 0; i < n; ++i) {
            out[grid.index(i, 0)] = rules.edge(m, set.k12(i, 0), set.k21(i, 0));
            for (std::size_t j = 1; j <= i; ++j) {
                const double mx = grid.x(i) - 0.5 * h;
                const double mxi = grid.x(j) - 0.5 * h;
                out[grid.index(i, j)] =
                    out[grid.index(i - 1, j - 1)] + s * step_source(rules, set, m, mx, mxi);
            }
        }
        return;
    }

    for (std::size_t j = 0; j < n; ++j) {
        out[grid.index(n - 1, j)] = rules.edge(m, set.k12(n - 1, j), set.k21(n - 1, j));
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double mx = grid.x(i) + 0.5 * h;
            const double mxi = grid.x(j) + 0.5 * h;
            out[grid.index(i, j)] =
                out[grid.index(i + 1, j + 1)] - s * step_source(rules, set, m, mx, mxi);
        }
    }
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
    return out;
}

}  // namespace

KernelSet solve_kernels(KernelFamily family, const PlantCoefficients& coeffs,
                        const TriangularGrid& grid, const KernelSolverOptions& options) {
    if (!(options.tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "kernel tolerance must be positive");
    }
    if (std::abs(coeffs.ell - grid.ell) > 1e-12 * coeffs.ell) {
        throw Error(ErrorCode::GridMismatch, "kernel grid length differs from the plant length");
    }
    coeffs.validate_on(grid.line());

    const FamilyRules rules(family, coeffs);
    KernelSet set = KernelSet::zeros(family, grid);

    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        const auto previous = set.k;
        sweep_cross(rules, set, 1);
        sweep_cross(rules, set, 2);
        sweep_diagonal_pair(rules, set, 0);
        sweep_diagonal_pair(rules, set, 3);

        double increment = 0.0;
        for (std::size_t m = 0; m < 4; ++m) {
            increment = std::max(increment, max_abs_diff(set.k[m], previous[m]));
        }
        if (!std::isfinite(increment)) {
            throw Error(ErrorCode::NonConvergence,
                        std::string("kernel iteration diverged for family ") +
                            std::string(to_string(family)));
        }
        set.iterations = iter;
        set.last_increment = increment;
        if (increment <= options.tol) return set;
    }
    throw Error(ErrorCode::NonConvergence,
                std::string("kernel family ") + std::string(to_string(family)) +
                    " did not converge in " + std::to_string(options.max_iter) +
                    " sweeps (last increment " + std::to_string(set.last_increment) + ")");
}

double KernelResiduals::max() const {
    double out = std::max(diagonal, edge);
    for (double r : pde) out = std::max(out, r);
    return out;
}

KernelResiduals kernel_residuals(const KernelSet& set, const PlantCoefficients& coeffs) {
    const FamilyRules rules(set.family, coeffs);
    const auto& grid = set.grid;
    const std::size_t n = grid.n_x;
    const double h = grid.dx();
    KernelResiduals out;

    for (std::size_t m : {std::size_t{1}, std::size_t{2}}) {
        const auto [ax, axi] = rules.speeds(m);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.x(i);
            out.diagonal = std::max(out.diagonal, std::abs(set.at(m, i, i) - rules.diagonal(m, x)));
            for (std::size_t j = 0; j < i; ++j) {
                const double xi = grid.x(j);
                const CrossStep st = cross_step(x, xi, ax, -axi, h);
                const double foot = st.on_diagonal ? rules.diagonal(m, st.foot_x)
                                                   : column_value(grid, set.k[m], i - 1, st.foot_xi);
                const double slope = (set.at(m, i, j) - foot) / st.s;
                const double src =
                    step_source(rules, set, m, 0.5 * (x + st.foot_x), 0.5 * (xi + st.foot_xi));
                out.pde[m] = std::max(out.pde[m], std::abs(slope - src));
            }
        }
    }

    for (std::size_t m : {std::size_t{0}, std::size_t{3}}) {
        const double a = rules.speeds(m).first;
        const double s = h / a;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const bool on_edge = rules.controller_like() ? j == 0 : i == n - 1;
                if (on_edge) {
                    const double want = rules.edge(m, set.k12(i, j), set.k21(i, j));
                    out.edge = std::max(out.edge, std::abs(set.at(m, i, j) - want));
                    continue;
                }
                double slope = 0.0;
                double src = 0.0;
                if (rules.controller_like()) {
                    slope = (set.at(m, i, j) - set.at(m, i - 1, j - 1)) / s;
                    src = step_source(rules, set, m, grid.x(i) - 0.5 * h, grid.x(j) - 0.5 * h);
                } else {
                    slope = (set.at(m, i + 1, j + 1) - set.at(m, i, j)) / s;
                    src = step_source(rules, set, m, grid.x(i) + 0.5 * h, grid.x(j) + 0.5 * h);
                }
                out.pde[m] = std::max(out.pde[m], std::abs(slope - src));
            }
        }
    }
    return out;
}

void write_kernels_csv(std::ostream& out, const KernelSet& set) {
    out << "x,xi,k11,k12,k21,k22\n";
    const auto& grid = set.grid;
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            write_row(out, {grid.x(i), grid.x(j), set.k11(i, j), set.k12(i, j), set.k21(i, j),
                            set.k22(i, j)});
        }
    }
}

}  // namespace hypetc
