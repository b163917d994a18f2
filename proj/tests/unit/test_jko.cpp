#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "rbridge/errors.hpp"
#include "rbridge/fpk.hpp"

using namespace rbridge;

namespace {

DriftSpec quadratic() {
    return DriftSpec::from_potential([](std::span<const double> x) { return x[0] * x[0] / 5.0; },
                                     [](std::span<const double> x) { return std::array<double, 2>{2.0 * x[0] / 5.0, 0.0}; });
}

GridDensity skewed_rho0(const Grid& g) {
    return normalize(GridDensity::sample(g, [](std::span<const double> x) { return oracle::rho0_shape(x[0]); }));
}

}  // namespace

TEST_CASE("prox of the uniform density under zero drift is the identity") {
    const Grid g = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 201);
    const FpkProblem p(g, DriftSpec::zero(), 0.5, 1e-3);
    const auto uni = normalize(GridDensity::constant(g, 1.0));
    for (double tau : {1e-3, 0.1, 1.0}) {
        const auto out = prox_step_jko(p, uni, tau);
        CHECK(linf_distance(out, uni) <= 1e-10);
    }
}

TEST_CASE("prox moves the density by O(tau)") {
    const Grid g = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 201);
    const FpkProblem p(g, quadratic(), 0.5, 1e-3);
    const auto rho = skewed_rho0(g);
    double prev_ratio = 0.0;
    for (double tau : {1e-2, 1e-3, 1e-4}) {
        const double ratio = linf_distance(prox_step_jko(p, rho, tau), rho) / tau;
        MESSAGE("tau " << tau << ": |prox - rho| / tau = " << ratio);
        CHECK(ratio < 1.0);
        if (prev_ratio > 0.0) CHECK(ratio == doctest::Approx(prev_ratio).epsilon(0.25));
        prev_ratio = ratio;
    }
}

TEST_CASE("one prox step tracks one implicit finite-volume step") {
    const Grid g = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 401);
    const auto rho = skewed_rho0(g);
    for (int which = 0; which < 2; ++which) {
        const DriftSpec drift = which == 0 ? DriftSpec::zero() : quadratic();
        double prev = INFINITY;
        for (double tau : {4e-3, 2e-3, 1e-3}) {
            const FpkProblem p(g, drift, 0.5, tau);
            const double gap = linf_distance(prox_step_jko(p, rho, tau), step_forward(p, rho));
            MESSAGE("drift " << which << " tau " << tau << ": gap " << gap << ", gap / tau^2 " << gap / (tau * tau));
            CHECK(gap < prev);
            prev = gap;
        }
    }
}

TEST_CASE("free energy decreases along prox iterations") {
    const Grid g = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 201);
    LagrangianDensity state(skewed_rho0(g));
    double f = state.free_energy(quadratic(), 0.5);
    for (int k = 0; k < 20; ++k) {
        state = state.prox(quadratic(), 0.5, 0.05);
        const double next = state.free_energy(quadratic(), 0.5);
        CHECK(next <= f + 1e-14);
        f = next;
    }
    double total = 0.0;
    for (double m : state.masses()) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    const auto& x = state.positions();
    CHECK(x.front() == -4.0);
    CHECK(x.back() == 4.0);
    for (std::size_t k = 0; k + 1 < x.size(); ++k) CHECK(x[k + 1] > x[k]);
}

TEST_CASE("prox error reporting") {
    const Grid g = Grid::uniform(BoxDomain::interval(0.0, 1.0), 21);
    std::vector<double> v(21, 1.0);
    v[7] = 0.0;
    try {
        (void)LagrangianDensity(GridDensity(g, v));
        FAIL("expected NonPositive");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPositive);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const DriftSpec broken = DriftSpec::from_potential([](std::span<const double>) { return 0.0; },
                                                       [nan](std::span<const double>) { return std::array<double, 2>{nan, 0.0}; });
    try {
        (void)prox_step_jko(FpkProblem(g, broken, 0.5, 0.01), normalize(GridDensity::constant(g, 1.0)), 0.01);
        FAIL("expected ProxNoConverge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProxNoConverge);
    }

    const Grid g2(BoxDomain::square(0.0, 1.0), {5, 5});
    CHECK_THROWS_AS((void)prox_step_jko(FpkProblem(g2, DriftSpec::zero(), 0.5, 0.01), GridDensity::constant(g2, 1.0), 0.01),
                    Error);
}
