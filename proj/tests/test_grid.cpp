#include <doctest.h>

#include <cmath>
#include <vector>

#include "hypetc/error.hpp"
#include "hypetc/grid.hpp"

using namespace hypetc;

TEST_CASE("uniform grid spacing and nodes") {
    const UniformGrid g(201, 10.0);
    CHECK(g.dx() == doctest::Approx(0.05));
    CHECK(g.x(0) == 0.0);
    CHECK(g.x(200) == doctest::Approx(10.0));
    CHECK(g.nodes().size() == 201);
}

TEST_CASE("grids reject fewer than three nodes or nonpositive length") {
    CHECK_THROWS_AS(UniformGrid(2, 1.0), Error);
    CHECK_THROWS_AS(TriangularGrid(2, 1.0), Error);
    CHECK_THROWS_AS(TriangularGrid(5, 0.0), Error);
    CHECK_THROWS_AS(UniformGrid(5, -1.0), Error);
}

TEST_CASE("triangular grid stores only xi <= x, row by row") {
    const TriangularGrid t(4, 3.0);
    CHECK(t.size() == 10);
    CHECK(t.index(0, 0) == 0);
    CHECK(t.index(1, 0) == 1);
    CHECK(t.index(1, 1) == 2);
    CHECK(t.index(3, 3) == 9);
    for (std::size_t i = 0; i < t.n_x; ++i) {
        for (std::size_t j = 0; j <= i; ++j) CHECK(t.x(j) <= t.x(i));
    }
}

TEST_CASE("trapezoid is exact for linear data") {
    std::vector<double> f(11);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 2.0 + 3.0 * 0.1 * static_cast<double>(i);
    // int_0^1 (2 + 3x) dx = 3.5
    CHECK(trapezoid(f, 0.1) == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(trapezoid_prefix(f, 1, 0.1) == 0.0);
    CHECK(trapezoid_prefix(f, 2, 0.1) == doctest::Approx(0.1 * (2.0 + 2.3) / 2.0));
}

TEST_CASE("derivative: central inside, one-sided at the ends") {
    const double h = 0.1;
    std::vector<double> f(6);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = h * static_cast<double>(i);
        f[i] = x * x;
    }
    const auto d = derivative(f, h);
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        CHECK(d[i] == doctest::Approx(2.0 * h * static_cast<double>(i)).epsilon(1e-12));
    }
    CHECK(d[0] == doctest::Approx((f[1] - f[0]) / h));
    CHECK(d[5] == doctest::Approx((f[5] - f[4]) / h));
}
