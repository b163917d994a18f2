#include <algorithm>
#include <cmath>
#include <string>

#include "rbridge/bridge.hpp"
#include "rbridge/errors.hpp"

namespace rbridge {

namespace {

constexpr double kFloorDominantFraction = 0.01;

void check_inputs(const GridDensity& rho0, const GridDensity& rho1, const BridgeEngine& engine) {
    if (!(rho0.grid() == engine.grid()) || !(rho1.grid() == engine.grid())) {
        throw Error(ErrorCode::DomainMismatch, "endpoint densities must live on the engine grid");
    }
    for (const GridDensity* d : {&rho0, &rho1}) {
        if (std::abs(d->mass() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "endpoint densities must be normalized");
    }
}

}  // namespace

GridDensity floored_divide(const GridDensity& numerator, const GridDensity& divisor, double floor) {
    if (!(numerator.grid() == divisor.grid())) throw Error(ErrorCode::DomainMismatch, "division needs a shared grid");
    const double guard = floor * divisor.max_value();
    if (!(guard > 0.0)) throw Error(ErrorCode::NonPositive, "divisor vanishes identically");
    std::vector<double> out(numerator.size());
    std::size_t support = 0;
    std::size_t floored = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const bool inside = numerator[i] > 0.0;
        support += inside;
        double d = divisor[i];
        if (d < guard) {
            d = guard;
            floored += inside;
        }
        out[i] = numerator[i] / d;
    }
    if (static_cast<double>(floored) > kFloorDominantFraction * static_cast<double>(support)) {
        throw Error(ErrorCode::FloorDominant, std::to_string(floored) + " of " + std::to_string(support) +
                                                  " support nodes fell below the density floor");
    }
    return GridDensity(numerator.grid(), std::move(out));
}

FactorPair half_bridge(const FactorPair& fp, const BridgeEngine& engine, const GridDensity& rho0,
                       const GridDensity& rho1, double density_floor) {
    const Grid& g = engine.grid();
    const GridDensity phi0(g, engine.backward(fp.phi1.values()));
    const GridDensity phihat0 = normalize(floored_divide(rho0, phi0, density_floor));
    const GridDensity phihat1(g, engine.forward(phihat0.values()));
    return FactorPair{floored_divide(rho1, phihat1, density_floor), phihat0};
}

BridgeSolution solve(const GridDensity& rho0, const GridDensity& rho1, const SolverConfig& config,
                     const BridgeEngine& engine, const std::optional<GridDensity>& initial_phi1) {
    config.validate();
    check_inputs(rho0, rho1, engine);
    const Grid& g = engine.grid();

    FactorPair fp{initial_phi1 ? *initial_phi1 : GridDensity::constant(g, 1.0), rho0};
    if (!(fp.phi1.grid() == g)) throw Error(ErrorCode::DomainMismatch, "initial guess lives on a different grid");
    if (!(fp.phi1.min_value() > 0.0)) throw Error(ErrorCode::NonPositive, "initial guess must be strictly positive");

    std::vector<ResidualRecord> trace;
    std::size_t iterations = 0;
    bool converged = false;
    for (std::size_t it = 1; it <= config.fp_max_iter; ++it) {
        FactorPair next = half_bridge(fp, engine, rho0, rho1, config.density_floor);
        // phi1 vanishes off the support of rho1 and phihat0 off that of rho0.
        const double r1 = hilbert_metric(next.phi1, fp.phi1, rho1);
        const double r0 = hilbert_metric(next.phihat0, fp.phihat0, rho0);
        trace.push_back({it, r1, r0});
        fp = std::move(next);
        iterations = it;
        if (r1 < config.fp_tol && r0 < config.fp_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        const auto& last = trace.back();
        throw Error(ErrorCode::MaxIterations, "fixed point not reached after " + std::to_string(config.fp_max_iter) +
                                                  " iterations, residual " + std::to_string(std::max(last.phi1, last.phihat0)));
    }

    std::vector<double> times(config.snapshots);
    for (std::size_t k = 0; k < times.size(); ++k) {
        times[k] = engine.representable(static_cast<double>(k) / static_cast<double>(times.size() - 1));
    }
    auto phis = engine.backward_snapshots(fp.phi1.values(), times);
    auto phihats = engine.forward_snapshots(fp.phihat0.values(), times);
    // Pin the stored endpoints to the boundary data itself.
    phis.back() = fp.phi1.values();
    phihats.front() = fp.phihat0.values();

    std::vector<GridDensity> phi;
    std::vector<GridDensity> phihat;
    std::vector<GridDensity> rho;
    std::vector<VectorField> control;
    for (std::size_t k = 0; k < times.size(); ++k) {
        phi.emplace_back(g, std::move(phis[k]));
        phihat.emplace_back(g, std::move(phihats[k]));
        rho.push_back(hadamard_product(phi.back(), phihat.back()));
        control.push_back(compute_control(phi.back(), engine.theta()));
    }
    const double e0 = l1_distance(rho.front(), rho0);
    const double e1 = l1_distance(rho.back(), rho1);
    return BridgeSolution{engine.theta(), std::move(times), std::move(phi), std::move(phihat), std::move(rho),
                          std::move(control), std::move(trace), iterations, std::move(fp), e0, e1};
}

BridgeSolution solve(const GridDensity& rho0, const GridDensity& rho1, const SolverConfig& config,
                     const ReflectedHeatKernel& kernel) {
    return solve(rho0, rho1, config, KernelEngine(kernel, rho0.grid()));
}

BridgeSolution solve(const GridDensity& rho0, const GridDensity& rho1, const SolverConfig& config,
                     const FpkProblem& problem) {
    return solve(rho0, rho1, config, FpkEngine(problem));
}

}  // namespace rbridge
