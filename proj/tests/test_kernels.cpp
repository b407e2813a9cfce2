#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "helpers.hpp"
#include "hypetc/error.hpp"
#include "hypetc/kernels.hpp"

using namespace hypetc;
using testing::kFamilies;

TEST_CASE("zero coupling yields identically zero kernels for every family") {
    const auto c = PlantCoefficients::constant(2.0, 1.5, 0.0, 0.0, -0.7, 0.3, 2.0);
    const TriangularGrid grid(41, 2.0);
    for (auto fam : kFamilies) {
        const KernelSet k = solve_kernels(fam, c, grid);
        for (const auto& kk : k.k) CHECK(testing::max_abs(kk) == 0.0);
    }
}

TEST_CASE("diagonal data are imposed exactly") {
    const auto c = testing::canal_plant();
    const TriangularGrid grid(101, c.ell);
    const double sum = c.lambda1 + c.lambda2;
    const KernelSet K = solve_kernels(KernelFamily::Controller, c, grid);
    const KernelSet P = solve_kernels(KernelFamily::Observer, c, grid);
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        const double x = grid.x(i);
        CHECK(K.k12(i, i) == c.c1(x) / sum);
        CHECK(K.k21(i, i) == -c.c2(x) / sum);
        CHECK(P.k12(i, i) == -c.c1(x) / sum);
        CHECK(P.k21(i, i) == c.c2(x) / sum);
    }
}

TEST_CASE("edge conditions: xi = 0 for K and L, x = ell for P and R") {
    const auto c = testing::canal_plant();
    const TriangularGrid grid(101, c.ell);
    for (auto fam : {KernelFamily::Controller, KernelFamily::InverseController}) {
        const KernelSet k = solve_kernels(fam, c, grid);
        for (std::size_t i = 0; i < grid.n_x; ++i) {
            CHECK(k.k11(i, 0) * c.q * c.lambda1 == doctest::Approx(c.lambda2 * k.k12(i, 0)));
            CHECK(k.k22(i, 0) * c.lambda2 == doctest::Approx(c.q * c.lambda1 * k.k21(i, 0)));
        }
    }
    const std::size_t last = grid.n_x - 1;
    for (auto fam : {KernelFamily::Observer, KernelFamily::InverseObserver}) {
        const KernelSet k = solve_kernels(fam, c, grid);
        for (std::size_t j = 0; j <= last; ++j) {
            CHECK(k.k11(last, j) * c.rho == doctest::Approx(k.k21(last, j)));
            CHECK(k.k22(last, j) == doctest::Approx(c.rho * k.k12(last, j)));
        }
    }
}

TEST_CASE("discrete transport residuals stay below the solver tolerance") {
    const auto c = testing::canal_plant();
    const TriangularGrid grid(101, c.ell);
    for (auto fam : kFamilies) {
        const KernelSet k = solve_kernels(fam, c, grid);
        const KernelResiduals r = kernel_residuals(k, c);
        CHECK(k.last_increment <= 1e-8);
        CHECK(r.max() <= 1e-6);
    }
}

TEST_CASE("constant coefficients: coarse solution within a first-order bound of a 4x finer one") {
    const auto c = PlantCoefficients::constant(1.0, 1.0, 0.1, 0.1, 1.0, 1.0, 1.0);
    const KernelSet coarse = solve_kernels(KernelFamily::Controller, c, TriangularGrid(26, 1.0));
    const KernelSet fine = solve_kernels(KernelFamily::Controller, c, TriangularGrid(101, 1.0));
    double scale = 0.0;
    for (const auto& kk : fine.k) scale = std::max(scale, testing::max_abs(kk));
    REQUIRE(scale > 0.0);
    const double h = coarse.grid.dx();
    CHECK(testing::shared_node_error(coarse, fine) <= 4.0 * h * scale);
}

TEST_CASE("grid refinement is at least first order on the canal coefficients") {
    const auto c = testing::canal_plant();
    const KernelSet ref = solve_kernels(KernelFamily::Controller, c, TriangularGrid(401, c.ell));
    const KernelSet a = solve_kernels(KernelFamily::Controller, c, TriangularGrid(51, c.ell));
    const KernelSet b = solve_kernels(KernelFamily::Controller, c, TriangularGrid(101, c.ell));
    const double ratio = testing::shared_node_error(a, ref) / testing::shared_node_error(b, ref);
    CHECK(ratio >= 1.8);
}

TEST_CASE("interpolation reproduces nodes and linear functions") {
    const TriangularGrid grid(11, 1.0);
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        for (std::size_t j = 0; j <= i; ++j) f[grid.index(i, j)] = 2.0 * grid.x(i) - grid.x(j) + 1.0;
    }
    CHECK(interpolate(grid, f, 0.3, 0.2) == doctest::Approx(1.4));
    CHECK(interpolate(grid, f, 0.35, 0.12) == doctest::Approx(2.0 * 0.35 - 0.12 + 1.0));
    CHECK(interpolate(grid, f, 0.55, 0.54) == doctest::Approx(2.0 * 0.55 - 0.54 + 1.0));
    CHECK(interpolate(grid, f, 1.0, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("solver error paths") {
    const TriangularGrid grid(21, 1.0);
    auto good = PlantCoefficients::constant(1.0, 1.0, 0.5, 0.5, 0.5, 0.5, 1.0);

    SUBCASE("non-finite coupling") {
        auto bad = good;
        bad.c1 = [](double x) { return x > 0.5 ? std::numeric_limits<double>::infinity() : 0.0; };
        try {
            solve_kernels(KernelFamily::Controller, bad, grid);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidCoefficients);
        }
    }
    SUBCASE("zero reflection") {
        auto bad = good;
        bad.q = 0.0;
        CHECK_THROWS_AS(solve_kernels(KernelFamily::Controller, bad, grid), Error);
    }
    SUBCASE("nonpositive speed") {
        auto bad = good;
        bad.lambda2 = 0.0;
        CHECK_THROWS_AS(solve_kernels(KernelFamily::Observer, bad, grid), Error);
    }
    SUBCASE("nonpositive tolerance") {
        KernelSolverOptions opt;
        opt.tol = 0.0;
        try {
            solve_kernels(KernelFamily::Controller, good, grid, opt);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidArgument);
        }
    }
    SUBCASE("iteration budget exhausted") {
        KernelSolverOptions opt;
        opt.max_iter = 1;
        try {
            solve_kernels(KernelFamily::Controller, good, grid, opt);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NonConvergence);
        }
    }
    SUBCASE("grid length differs from the plant") {
        try {
            solve_kernels(KernelFamily::Controller, good, TriangularGrid(21, 2.0));
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::GridMismatch);
        }
    }
}

TEST_CASE("kernel CSV lists every stored node") {
    const auto c = PlantCoefficients::constant(1.0, 1.0, 0.1, 0.1, 0.5, 0.5, 1.0);
    const KernelSet k = solve_kernels(KernelFamily::Controller, c, TriangularGrid(5, 1.0));
    std::ostringstream out;
    write_kernels_csv(out, k);
    const std::string text = out.str();
    CHECK(text.rfind("x,xi,k11,k12,k21,k22\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 15);
}
