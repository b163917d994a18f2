#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "rbridge/config.hpp"
#include "rbridge/density.hpp"
#include "rbridge/fpk.hpp"
#include "rbridge/kernel.hpp"

namespace rbridge {

/// Hilbert projective metric log max(u/v) - log min(u/v).
/// Throws NonPositive if any node of u or v is <= 0.
[[nodiscard]] double hilbert_metric(const GridDensity& u, const GridDensity& v);

/// Same metric restricted to nodes where `support` is positive.
[[nodiscard]] double hilbert_metric(const GridDensity& u, const GridDensity& v, const GridDensity& support);

/// Propagates the Schrodinger factors across the unit horizon.
///
/// backward maps phi(1) to phi(0) under the backward Kolmogorov equation,
/// forward maps phihat(0) to phihat(1) under the forward one.
class BridgeEngine {
public:
    virtual ~BridgeEngine() = default;

    [[nodiscard]] virtual const Grid& grid() const noexcept = 0;
    [[nodiscard]] virtual double theta() const noexcept = 0;

    [[nodiscard]] virtual std::vector<double> backward(const std::vector<double>& phi1) const = 0;
    [[nodiscard]] virtual std::vector<double> forward(const std::vector<double>& phihat0) const = 0;

    /// phi(t) for each t in `times`, which must be ascending and representable.
    [[nodiscard]] virtual std::vector<std::vector<double>> backward_snapshots(
        const std::vector<double>& phi1, const std::vector<double>& times) const = 0;
    [[nodiscard]] virtual std::vector<std::vector<double>> forward_snapshots(
        const std::vector<double>& phihat0, const std::vector<double>& times) const = 0;

    /// Nearest time the engine can report a snapshot at.
    [[nodiscard]] virtual double representable(double t) const { return t; }
};

/// Zero-drift engine: exact reflected heat semigroup, 1D or tensor 2D.
class KernelEngine final : public BridgeEngine {
public:
    KernelEngine(const Grid& grid, double theta, std::size_t series_terms = 100);
    KernelEngine(const ReflectedHeatKernel& kernel, const Grid& grid);

    [[nodiscard]] const Grid& grid() const noexcept override { return propagator_.grid(); }
    [[nodiscard]] double theta() const noexcept override { return theta_; }
    [[nodiscard]] const KernelPropagator& propagator() const noexcept { return propagator_; }

    [[nodiscard]] std::vector<double> backward(const std::vector<double>& phi1) const override;
    [[nodiscard]] std::vector<double> forward(const std::vector<double>& phihat0) const override;
    [[nodiscard]] std::vector<std::vector<double>> backward_snapshots(
        const std::vector<double>& phi1, const std::vector<double>& times) const override;
    [[nodiscard]] std::vector<std::vector<double>> forward_snapshots(
        const std::vector<double>& phihat0, const std::vector<double>& times) const override;

private:
    double theta_;
    KernelPropagator propagator_;
};

/// Gradient-drift engine on the implicit finite-volume stepper. The backward
/// factor is marched through the p-transform with the same factorization.
class FpkEngine final : public BridgeEngine {
public:
    explicit FpkEngine(const FpkProblem& problem);

    [[nodiscard]] const Grid& grid() const noexcept override { return stepper_.grid(); }
    [[nodiscard]] double theta() const noexcept override { return stepper_.problem().theta; }
    [[nodiscard]] const FvStepper& stepper() const noexcept { return stepper_; }
    [[nodiscard]] std::size_t steps() const noexcept { return steps_; }

    [[nodiscard]] std::vector<double> backward(const std::vector<double>& phi1) const override;
    [[nodiscard]] std::vector<double> forward(const std::vector<double>& phihat0) const override;
    [[nodiscard]] std::vector<std::vector<double>> backward_snapshots(
        const std::vector<double>& phi1, const std::vector<double>& times) const override;
    [[nodiscard]] std::vector<std::vector<double>> forward_snapshots(
        const std::vector<double>& phihat0, const std::vector<double>& times) const override;
    [[nodiscard]] double representable(double t) const override;

private:
    [[nodiscard]] std::vector<std::vector<double>> run(const std::vector<double>& v, MarchMode mode,
                                                       const std::vector<std::size_t>& record) const;

    FvStepper stepper_;
    std::size_t steps_;
};

/// Boundary data (phi1, phihat0). phihat0 carries unit mass, so the
/// projective scale lives entirely in phi1.
struct FactorPair {
    GridDensity phi1;
    GridDensity phihat0;
};

struct ResidualRecord {
    std::size_t iteration;
    double phi1;
    double phihat0;
};

/// Nodal vector field, one entry per grid node (second component unused in 1D).
using VectorField = std::vector<std::array<double, 2>>;

struct BridgeSolution {
    double theta;
    std::vector<double> times;
    std::vector<GridDensity> phi;
    std::vector<GridDensity> phihat;
    std::vector<GridDensity> rho;
    std::vector<VectorField> control;
    std::vector<ResidualRecord> residual_trace;
    std::size_t iterations = 0;
    FactorPair factors;
    /// L1(phi0 phihat0, rho0) and L1(phi1 phihat1, rho1).
    double endpoint_error0 = 0.0;
    double endpoint_error1 = 0.0;

    [[nodiscard]] const Grid& grid() const noexcept { return rho.front().grid(); }
};

/// Divides `numerator` by `divisor` nodewise with the divisor raised to at
/// least floor * max(divisor). Throws FloorDominant when more than 1% of the
/// nodes where numerator > 0 needed the floor.
[[nodiscard]] GridDensity floored_divide(const GridDensity& numerator, const GridDensity& divisor, double floor);

/// One loop phi1 -> phi0 -> phihat0 -> phihat1 -> phi1 with phihat0 renormalized.
[[nodiscard]] FactorPair half_bridge(const FactorPair& fp, const BridgeEngine& engine, const GridDensity& rho0,
                                     const GridDensity& rho1, double density_floor);

/// Fixed-point solve from phi1 = initial_phi1 (default 1). Stops when both
/// Hilbert residuals drop below config.fp_tol, else throws MaxIterations.
[[nodiscard]] BridgeSolution solve(const GridDensity& rho0, const GridDensity& rho1, const SolverConfig& config,
                                   const BridgeEngine& engine,
                                   const std::optional<GridDensity>& initial_phi1 = std::nullopt);
[[nodiscard]] BridgeSolution solve(const GridDensity& rho0, const GridDensity& rho1, const SolverConfig& config,
                                   const ReflectedHeatKernel& kernel);
[[nodiscard]] BridgeSolution solve(const GridDensity& rho0, const GridDensity& rho1, const SolverConfig& config,
                                   const FpkProblem& problem);

/// u = 2 theta grad log phi by central differences, normal component zero on
/// boundary nodes. Throws NonPositive if phi has a nonpositive node.
[[nodiscard]] VectorField compute_control(const GridDensity& phi, double theta);

/// Control at time t, linear between the stored snapshots.
[[nodiscard]] VectorField control_field(const BridgeSolution& sol, double t);

}  // namespace rbridge
