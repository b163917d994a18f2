#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rbridge/bridge.hpp"
#include "rbridge/errors.hpp"

using namespace rbridge;

namespace {

DriftSpec quadratic() {
    return DriftSpec::from_potential([](std::span<const double> x) { return x[0] * x[0] / 5.0; },
                                     [](std::span<const double> x) { return std::array<double, 2>{2.0 * x[0] / 5.0, 0.0}; });
}

GridDensity shape0(const Grid& g) {
    return normalize(GridDensity::sample(g, [](std::span<const double> x) { return oracle::rho0_shape(x[0]); }));
}

GridDensity shape1(const Grid& g) {
    return normalize(GridDensity::sample(g, [](std::span<const double> x) { return oracle::rho1_shape(x[0]); }));
}

double max_control(const VectorField& u) {
    double m = 0.0;
    for (const auto& v : u) m = std::max({m, std::abs(v[0]), std::abs(v[1])});
    return m;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no rbridge::Error thrown");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("hilbert metric examples") {
    const Grid g = Grid::uniform(BoxDomain::interval(0.0, 1.0), 3);
    const GridDensity u(g, {1.0, 2.0, 1.5});
    const GridDensity v(g, {2.0, 1.0, 1.5});
    CHECK(hilbert_metric(u, v) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
    CHECK(hilbert_metric(u, u.scaled(3.7)) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(hilbert_metric(u.scaled(2.0), v.scaled(5.0)) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    CHECK(code_of([&] { (void)hilbert_metric(GridDensity(g, {0.0, 1.0, 1.0}), v); }) == ErrorCode::NonPositive);
    // Off-support nodes are ignored by the restricted form.
    const Grid g3 = Grid::uniform(BoxDomain::interval(0.0, 1.0), 3);
    const GridDensity a(g3, {1.0, 2.0, 0.0});
    const GridDensity b(g3, {2.0, 1.0, 0.0});
    CHECK(hilbert_metric(a, b, GridDensity(g3, {1.0, 1.0, 0.0})) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("floored division") {
    const Grid g = Grid::uniform(BoxDomain::interval(0.0, 1.0), 201);
    const auto ones = GridDensity::constant(g, 1.0);
    const auto q = floored_divide(ones, GridDensity::constant(g, 4.0), 1e-12);
    CHECK(q[10] == 0.25);
    std::vector<double> tiny(201, 1e-20);
    tiny[0] = 1.0;
    CHECK(code_of([&] { (void)floored_divide(ones, GridDensity(g, tiny), 1e-12); }) == ErrorCode::FloorDominant);
    // Floored nodes outside the numerator's support do not count.
    std::vector<double> num(201, 0.0);
    num[0] = 1.0;
    CHECK_NOTHROW((void)floored_divide(GridDensity(g, num), GridDensity(g, tiny), 1e-12));
}

TEST_CASE("uniform to uniform is a fixed point with zero control") {
    const Grid g = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 101);
    const auto uni = normalize(GridDensity::constant(g, 1.0));
    const KernelEngine engine(g, 0.5);
    const FactorPair fp{GridDensity::constant(g, 1.0), uni};
    const FactorPair next = half_bridge(fp, engine, uni, uni, 1e-12);
    CHECK(hilbert_metric(next.phi1, fp.phi1) <= 1e-12);
    CHECK(linf_distance(next.phihat0, uni) <= 1e-12);

    SolverConfig cfg;
    const auto sol = solve(uni, uni, cfg, engine);
    CHECK(sol.iterations <= 2);
    for (const auto& r : sol.rho) CHECK(linf_distance(r, uni) <= 1e-12);
    for (const auto& u : sol.control) CHECK(max_control(u) <= 1e-12);
}

TEST_CASE("Gibbs endpoints under a gradient drift need no control") {
    const Grid g = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 201);
    const FpkProblem p(g, quadratic(), 0.5, 1e-2);
    const auto gibbs = gibbs_density(g, quadratic(), 0.5);
    const auto sol = solve(gibbs, gibbs, SolverConfig{}, p);
    for (const auto& u : sol.control) CHECK(max_control(u) <= 1e-6);
    CHECK(sol.endpoint_error0 <= 1e-9);
    CHECK(sol.endpoint_error1 <= 1e-9);
}

TEST_CASE("target equal to the prior image gives zero control") {
    const Grid g = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 201);
    const KernelEngine engine(g, 0.5);
    const auto rho0 = shape0(g);
    const auto rho1 = normalize(GridDensity(g, engine.forward(rho0.values())));
    const auto sol = solve(rho0, rho1, SolverConfig{}, engine);
    double worst = 0.0;
    for (const auto& u : sol.control) worst = std::max(worst, max_control(u));
    MESSAGE("max |u| = " << worst);
    CHECK(worst <= 1e-4);
}

TEST_CASE("1D bridge between skewed and periodic densities") {
    const Grid g = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 201);
    const KernelEngine engine(g, 0.5);
    const auto rho0 = shape0(g);
    const auto rho1 = shape1(g);
    SolverConfig cfg;
    const auto sol = solve(rho0, rho1, cfg, engine);

    CHECK(sol.iterations < 200);
    for (std::size_t k = 1; k < sol.residual_trace.size(); ++k) {
        const auto& a = sol.residual_trace[k - 1];
        const auto& b = sol.residual_trace[k];
        CHECK(std::max(b.phi1, b.phihat0) < std::max(a.phi1, a.phihat0));
    }
    CHECK(sol.endpoint_error0 <= 1e-6);
    CHECK(sol.endpoint_error1 <= 1e-6);
    REQUIRE(sol.times.size() == cfg.snapshots);
    for (const auto& r : sol.rho) CHECK(std::abs(r.mass() - 1.0) <= 1e-6);

    // Reflection makes every factor, and hence rho, flat at the walls.
    const auto& mid = sol.rho[5];
    const double h = g.spacing(0);
    double interior = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) interior = std::max(interior, std::abs(mid[i + 1] - mid[i - 1]) / (2 * h));
    const std::size_t n = g.size();
    const double left = (-3 * mid[0] + 4 * mid[1] - mid[2]) / (2 * h);
    const double right = (3 * mid[n - 1] - 4 * mid[n - 2] + mid[n - 3]) / (2 * h);
    MESSAGE("wall slopes " << left << ", " << right << " vs interior " << interior);
    CHECK(std::abs(left) <= 1e-2 * interior);
    CHECK(std::abs(right) <= 1e-2 * interior);

    SUBCASE("scaled initial guess converges to the same bridge") {
        const auto again = solve(rho0, rho1, cfg, engine, sol.factors.phi1.scaled(7.0));
        for (std::size_t k = 0; k < sol.rho.size(); ++k) {
            CHECK(linf_distance(again.rho[k], sol.rho[k]) <= 1e-8);
            for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(again.control[k][i][0] - sol.control[k][i][0]) <= 1e-8);
        }
    }
    SUBCASE("control interpolates between snapshots") {
        const auto u = control_field(sol, 0.25);
        const auto& a = sol.control[2];
        const auto& b = sol.control[3];
        CHECK(u[50][0] == doctest::Approx(0.5 * (a[50][0] + b[50][0])));
        CHECK(code_of([&] { (void)control_field(sol, 1.5); }) == ErrorCode::InvalidArgument);
    }
    SUBCASE("too few iterations") {
        SolverConfig tight = cfg;
        tight.fp_max_iter = 3;
        CHECK(code_of([&] { (void)solve(rho0, rho1, tight, engine); }) == ErrorCode::MaxIterations);
    }
}

TEST_CASE("engines agree on the zero-drift bridge") {
    const Grid g = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 201);
    const auto rho0 = shape0(g);
    const auto rho1 = shape1(g);
    const auto a = solve(rho0, rho1, SolverConfig{}, KernelEngine(g, 0.5));
    const auto b = solve(rho0, rho1, SolverConfig{}, FpkProblem(g, DriftSpec::zero(), 0.5, 1e-3));
    CHECK(linf_distance(a.rho[5], b.rho[5]) <= 1e-3);
}

TEST_CASE("control from a known factor") {
    const double theta = 0.5;
    const Grid g = Grid::uniform(BoxDomain::interval(-2.0, 2.0), 41);
    const auto phi = GridDensity::sample(g, [&](std::span<const double> x) { return std::exp(x[0] * x[0] / (4 * theta)); });
    const auto u = compute_control(phi, theta);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(u[i][0] == doctest::Approx(g.coordinate(0, i)).epsilon(1e-12));
    CHECK(u.front()[0] == 0.0);
    CHECK(u.back()[0] == 0.0);

    const Grid g2(BoxDomain::square(-1.0, 1.0), {9, 11});
    const auto phi2 = GridDensity::sample(g2, [](std::span<const double> x) { return std::exp(x[0] + 2 * x[1]); });
    const auto u2 = compute_control(phi2, theta);
    for (std::size_t k = 0; k < g2.size(); ++k) {
        const auto ij = g2.unflatten(k);
        if (ij[0] == 0 || ij[0] == 8) CHECK(u2[k][0] == 0.0); else CHECK(u2[k][0] == doctest::Approx(1.0));
        if (ij[1] == 0 || ij[1] == 10) CHECK(u2[k][1] == 0.0); else CHECK(u2[k][1] == doctest::Approx(2.0));
    }
    CHECK(code_of([&] { (void)compute_control(GridDensity::constant(g, 0.0), theta); }) == ErrorCode::NonPositive);
}

TEST_CASE("solver input validation") {
    const Grid g = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 51);
    const Grid other = Grid::uniform(BoxDomain::interval(-4.0, 4.0), 52);
    const KernelEngine engine(g, 0.5);
    const auto uni = normalize(GridDensity::constant(g, 1.0));
    CHECK(code_of([&] { (void)solve(GridDensity::constant(g, 3.0), uni, SolverConfig{}, engine); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([&] { (void)solve(normalize(GridDensity::constant(other, 1.0)), uni, SolverConfig{}, engine); }) ==
          ErrorCode::DomainMismatch);
    CHECK(code_of([&] { (void)FpkEngine(FpkProblem(g, DriftSpec::zero(), 0.5, 0.3)); }) == ErrorCode::InvalidArgument);
}
