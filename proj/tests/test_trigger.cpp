#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "hypetc/gains.hpp"
#include "hypetc/trigger.hpp"

using namespace hypetc;
using testing::code_of;

namespace {

GainProfiles canal_gains(std::size_t n = 201) {
    const auto c = testing::canal_plant();
    const TriangularGrid tri(n, c.ell);
    return gain_profiles(solve_kernels(KernelFamily::Controller, c, tri),
                         solve_kernels(KernelFamily::Observer, c, tri),
                         solve_kernels(KernelFamily::InverseController, c, tri), c);
}

EtcParams pinned() {
    EtcParams p;
    p.C = 413.4211;
    return p;
}

}  // namespace

TEST_CASE("dwell-time formula limits") {
    // theta_m = 0, sigma = 1/2: tau = ln(2) / a
    CHECK(dwell_time(1.0, 1.0, 0.5, 0.0) == doctest::Approx(std::log(2.0)));
    CHECK(dwell_time(2.0, 3.0, 0.5, 0.0) == doctest::Approx(std::log(2.0) / 2.0));
    CHECK(dwell_time(1.0, 1.0, 1e-12, 5.0) == doctest::Approx(0.0).epsilon(1e-10));
    double prev = 0.0;
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999}) {
        const double t = dwell_time(1.05, 1.0, s, 691.0);
        CHECK(t > prev);
        prev = t;
    }
    // larger theta_m shortens the dwell
    CHECK(dwell_time(1.0, 1.0, 0.9, 10.0) < dwell_time(1.0, 1.0, 0.9, 1.0));
}

TEST_CASE("design constants of the reference canal") {
    const auto c = testing::canal_plant();
    const GainProfiles g = canal_gains();
    const DesignConstants k = design_constants(g, c, pinned());
    CHECK(k.reflection == doctest::Approx(std::abs(c.rho * c.q)));
    CHECK(k.reflection < 0.5);
    CHECK(k.mu_upper > 0.016);
    CHECK(k.tau == doctest::Approx(0.13323).epsilon(0.05));
    CHECK_FALSE(k.C_below_lower);
    CHECK(k.C > k.C_lower);

    // closed-form relations among the constants
    const EtcParams p = pinned();
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(k.kappa[i] == doctest::Approx(p.theta * k.eps[i] / (1.0 - p.sigma)));
    }
    CHECK(k.a == doctest::Approx(1.0 + k.eps[3] + p.eta));
    CHECK(k.D == doctest::Approx(2.0 * k.C * c.q * c.q));
    CHECK(k.theta_m == doctest::Approx(2.0 * k.D * std::exp(p.mu * c.ell / c.lambda2)));
    CHECK(k.tau == doctest::Approx(dwell_time(k.a, p.theta, p.sigma, k.theta_m)));
    const double expected_eps3 = 5.0 * std::pow(c.lambda2 * g.Nbeta.back(), 2);
    CHECK(k.eps[3] == doctest::Approx(expected_eps3));
    for (double e : k.eps) CHECK(e >= 0.0);
}

TEST_CASE("derived C uses the margin over the lower bound") {
    const auto c = testing::canal_plant();
    const GainProfiles g = canal_gains(101);
    EtcParams p;
    p.c_margin = 0.5;
    const DesignConstants k = design_constants(g, c, p);
    CHECK(k.C == doctest::Approx(1.5 * k.C_lower));

    EtcParams low = pinned();
    low.C = 0.5 * k.C_lower;
    CHECK(design_constants(g, c, low).C_below_lower);
}

TEST_CASE("parameter and assumption errors") {
    const auto c = testing::canal_plant();
    const GainProfiles g = canal_gains(51);

    EtcParams p = pinned();
    p.mu = 0.5;
    p.delta = 0.1;
    CHECK(code_of([&] { design_constants(g, c, p); }) == ErrorCode::MuOutOfRange);

    auto strong = c;
    strong.q = 1.0;
    strong.rho = 1.0;
    CHECK(code_of([&] { design_constants(g, strong, pinned()); }) ==
          ErrorCode::AssumptionViolated);
    CHECK(code_of([&] { mu_upper_bound(strong); }) == ErrorCode::AssumptionViolated);

    auto bad = [](auto mutate) {
        EtcParams q = pinned();
        mutate(q);
        return code_of([&] { q.validate(); });
    };
    CHECK(bad([](EtcParams& q) { q.eta = 0.0; }) == ErrorCode::InvalidArgument);
    CHECK(bad([](EtcParams& q) { q.theta = -1.0; }) == ErrorCode::InvalidArgument);
    CHECK(bad([](EtcParams& q) { q.sigma = 1.0; }) == ErrorCode::InvalidArgument);
    CHECK(bad([](EtcParams& q) { q.m0 = 0.0; }) == ErrorCode::InvalidArgument);
    CHECK(bad([](EtcParams& q) { q.delta = q.mu; }) == ErrorCode::InvalidArgument);
    CHECK(bad([](EtcParams& q) { q.C = 0.0; }) == ErrorCode::InvalidArgument);
    CHECK(bad([](EtcParams& q) {
              q.C.reset();
              q.c_margin = 0.0;
          }) == ErrorCode::InvalidArgument);
    CHECK_FALSE(bad([](EtcParams&) {}));
}

TEST_CASE("dynamic variable integration") {
    DesignConstants k;
    k.kappa = {2.0, 3.0, 4.0};
    k.theta_m = 10.0;
    EtcParams p;

    SUBCASE("free decay follows the exponential") {
        TriggerState ts(-1.0);
        const double dt = 1e-3;
        for (int i = 0; i < 10000; ++i) update_m(ts, dt, k, p, 0.0, 0.0, 0.0);
        CHECK(ts.m == doctest::Approx(-std::exp(-p.eta * 10.0)).epsilon(1e-6));
    }
    SUBCASE("balanced right-hand side leaves m unchanged") {
        TriggerState ts(-1.0);
        ts.d = 0.1;
        // -eta m + theta_m d^2 = 0.001 + 0.1 = kappa terms
        const double rhs = p.eta + 10.0 * 0.01;
        CHECK(m_rate(-1.0, 0.1, k, p, rhs / 2.0, 0.0, 0.0) == doctest::Approx(0.0));
        update_m(ts, 0.1, k, p, 0.0, rhs / 3.0, 0.0);
        CHECK(ts.m == doctest::Approx(-1.0));
        update_m(ts, 0.1, k, p, 0.0, 0.0, rhs / 4.0);
        CHECK(ts.m == doctest::Approx(-1.0));
    }
}

TEST_CASE("continuous triggering rule and event bookkeeping") {
    DesignConstants k;
    EtcParams p;
    TriggerState ts(-1.0);
    ts.set_continuous(0.5);
    CHECK(ts.d == -0.5);
    CHECK(gamma_c(ts, k, p) == doctest::Approx(-0.75));
    CHECK_FALSE(cetc_should_trigger(ts, k, p));
    ts.set_continuous(2.0);
    CHECK(gamma_c(ts, k, p) == doctest::Approx(3.0));
    CHECK(cetc_should_trigger(ts, k, p));

    const EventRecord& e0 = ts.fire(1.0, 3.0);
    CHECK(e0.k == 0);
    CHECK(e0.dwell == 0.0);
    CHECK(ts.d == 0.0);
    CHECK(ts.U_held == 2.0);
    ts.set_continuous(2.5);
    const EventRecord& e1 = ts.fire(1.75);
    CHECK(e1.k == 1);
    CHECK(e1.dwell == doctest::Approx(0.75));
    CHECK(ts.events.size() == 2);
    CHECK(std::isnan(ts.events[0].F));
}
