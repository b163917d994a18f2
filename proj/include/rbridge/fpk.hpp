#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "rbridge/density.hpp"
#include "rbridge/domain.hpp"
#include "rbridge/drift.hpp"

namespace rbridge {

/// Forward Kolmogorov problem d rho/dt = div(grad V rho) + theta Lap rho on a
/// box with zero normal flux, discretized on `grid` with implicit step `dt`.
struct FpkProblem {
    Grid grid;
    DriftSpec drift;
    double theta;
    double dt;

    FpkProblem(Grid g, DriftSpec f, double theta_, double dt_);

    /// max over axes of dt * theta / h^2.
    [[nodiscard]] double diffusion_number() const;
};

enum class MarchMode { Forward, BackwardFactor };

/// Implicit Euler finite-volume stepper with exponentially fitted
/// (Scharfetter-Gummel) two-point fluxes.
///
/// The face flux is (theta/h) (B(d) rho_i - B(-d) rho_j) with B(d) = d/(e^d - 1)
/// and d = (V_j - V_i)/theta, so the Gibbs density is an exact discrete steady
/// state. Scaling the unknown
/// as z = sqrt(w) exp(V / 2 theta) rho turns the step matrix into a symmetric
/// M-matrix I - dt A, factorized once: tridiagonal LDL^T in 1D, sparse
/// LDL^T in 2D. Boundary faces carry no flux, so trapezoid mass is conserved.
class FvStepper {
public:
    explicit FvStepper(const FpkProblem& problem);

    [[nodiscard]] const FpkProblem& problem() const noexcept { return problem_; }
    [[nodiscard]] const Grid& grid() const noexcept { return problem_.grid; }
    [[nodiscard]] double dt() const noexcept { return problem_.dt; }
    [[nodiscard]] double diffusion_number() const noexcept { return diffusion_number_; }
    [[nodiscard]] const std::vector<double>& potential_over_theta() const noexcept { return v_over_theta_; }

    [[nodiscard]] GridDensity step_forward(const GridDensity& d) const;
    /// One reversed-time step of the backward factor phi through p = phi exp(-V/theta).
    [[nodiscard]] GridDensity step_backward_factor(const GridDensity& phi) const;

    /// Snapshots after every `record_every` steps, first entry is d0. In
    /// BackwardFactor mode d0 is phi(t1) and entry k sits at t1 - k*record_every*dt.
    [[nodiscard]] std::vector<GridDensity> march(const GridDensity& d0, double t0, double t1, MarchMode mode,
                                                 std::size_t record_every = 1) const;

    /// p-transform: p = phi exp(-V/theta) and its inverse.
    [[nodiscard]] GridDensity to_p(const GridDensity& phi) const;
    [[nodiscard]] GridDensity from_p(const GridDensity& p) const;

    // Scaled-variable interface used by the bridge engine.
    [[nodiscard]] std::vector<double> to_scaled(const std::vector<double>& v, MarchMode mode) const;
    [[nodiscard]] std::vector<double> from_scaled(const std::vector<double>& z, MarchMode mode) const;
    /// Solves (I - dt A) z_new = z in place.
    void advance_scaled(std::vector<double>& z) const;

    /// Symmetric generator A (for tests). Dense, only for small grids.
    [[nodiscard]] std::vector<double> generator_dense() const;

private:
    struct SparseFactor;

    [[nodiscard]] GridDensity to_density(std::vector<double> v) const;

    FpkProblem problem_;
    double diffusion_number_ = 0.0;
    std::vector<double> v_over_theta_;
    std::vector<double> sqrt_w_;
    // Generator A in coordinate form, used for both the 1D and 2D paths.
    std::vector<double> diag_;
    struct Edge {
        std::size_t i;
        std::size_t j;
        double value;
    };
    std::vector<Edge> edges_;
    // 1D tridiagonal LDL^T of I - dt A.
    std::vector<double> ldl_d_;
    std::vector<double> ldl_l_;
    std::shared_ptr<const SparseFactor> sparse_;
};

[[nodiscard]] GridDensity step_forward(const FpkProblem& p, const GridDensity& d);
[[nodiscard]] GridDensity step_backward_factor(const FpkProblem& p, const GridDensity& d);
[[nodiscard]] std::vector<GridDensity> march(const FpkProblem& p, const GridDensity& d0, double t0, double t1,
                                             MarchMode mode);

/// F(rho) = int V rho + theta int rho log rho.
struct LyapunovFunctional {
    DriftSpec drift;
    double theta;
};

[[nodiscard]] double lyapunov_value(const LyapunovFunctional& L, const GridDensity& d);

/// Gibbs density proportional to exp(-V/theta), normalized on the grid.
[[nodiscard]] GridDensity gibbs_density(const Grid& grid, const DriftSpec& drift, double theta);

/// Quadratic Wasserstein distance between 1D densities via quantile functions.
/// The two densities may live on different intervals.
[[nodiscard]] double wasserstein1d(const GridDensity& d1, const GridDensity& d2);

/// Quantile function of a 1D density under its piecewise-linear interpolant.
class QuantileFunction {
public:
    explicit QuantileFunction(const GridDensity& d);

    [[nodiscard]] double operator()(double q) const;
    [[nodiscard]] double cdf(double x) const;
    [[nodiscard]] const std::vector<double>& cdf_nodes() const noexcept { return cdf_; }

private:
    std::vector<double> x_;
    std::vector<double> rho_;
    std::vector<double> cdf_;
};

/// Particle discretization of a 1D density for the Wasserstein proximal step:
/// node positions x_k (x_0 = a, x_K = b pinned) each carrying mass nu_k, with
/// density nu_k / v_k over the trapezoid control volume v_k.
class LagrangianDensity {
public:
    explicit LagrangianDensity(const GridDensity& d);

    [[nodiscard]] const std::vector<double>& positions() const noexcept { return x_; }
    [[nodiscard]] const std::vector<double>& masses() const noexcept { return nu_; }
    [[nodiscard]] std::vector<double> control_volumes() const;

    /// Discrete F: sum nu V(x) + theta sum nu log(nu / v).
    [[nodiscard]] double free_energy(const DriftSpec& drift, double theta) const;

    /// Interpolates nodal densities back onto `grid` and renormalizes.
    [[nodiscard]] GridDensity to_grid(const Grid& grid) const;

    /// argmin 1/2 W^2(this, rho) + tau F(rho), Newton on node positions.
    [[nodiscard]] LagrangianDensity prox(const DriftSpec& drift, double theta, double tau) const;

private:
    LagrangianDensity() = default;

    std::vector<double> x_;
    std::vector<double> nu_;
};

/// One Wasserstein proximal step taken from and returned to grid form.
[[nodiscard]] GridDensity prox_step_jko(const FpkProblem& p, const GridDensity& d, double tau);

/// `steps` proximal steps of size tau, keeping the particle state between steps.
[[nodiscard]] GridDensity jko_march(const FpkProblem& p, const GridDensity& d0, double tau, std::size_t steps);

}  // namespace rbridge
