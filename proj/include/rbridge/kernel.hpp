#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rbridge/density.hpp"
#include "rbridge/domain.hpp"

namespace rbridge {

/// Transition density of two-sided reflected Brownian motion
/// dx = sqrt(2 theta) dw + dL - dU on [a, b].
///
/// Two evaluation routes are provided. The cosine (Neumann eigenfunction)
/// series converges fast for moderate t, the Gaussian image sum for small t;
/// Poisson summation makes them the same function.
class ReflectedHeatKernel {
public:
    /// Largest truncation required_terms() will return before reporting Diverged.
    static constexpr std::size_t kMaxSeriesTerms = 10000;

    ReflectedHeatKernel(double a, double b, double theta, std::size_t series_terms = 100);
    ReflectedHeatKernel(const BoxDomain& interval, double theta, std::size_t series_terms = 100);

    [[nodiscard]] double lower() const noexcept { return a_; }
    [[nodiscard]] double upper() const noexcept { return b_; }
    [[nodiscard]] double length() const noexcept { return b_ - a_; }
    [[nodiscard]] double theta() const noexcept { return theta_; }
    [[nodiscard]] std::size_t series_terms() const noexcept { return terms_; }

    /// Cosine series truncated at series_terms().
    [[nodiscard]] double eval_cosine(double x, double y, double t) const;
    [[nodiscard]] double eval_cosine(double x, double y, double t, std::size_t terms) const;

    /// Image sum over m = -n_images .. n_images.
    [[nodiscard]] double eval_images(double x, double y, double t, std::size_t n_images) const;

    /// Upper bound on (2/r) * sum_{m > terms} exp(-theta pi^2 m^2 t / r^2).
    [[nodiscard]] double tail_bound(double t, std::size_t terms) const;

    /// Smallest M >= 1 with tail_bound(t, M) < tol. Throws Diverged past kMaxSeriesTerms.
    [[nodiscard]] std::size_t required_terms(double t, double tol) const;

    /// Image count that makes the neglected Gaussians smaller than tol.
    [[nodiscard]] std::size_t required_images(double t, double tol) const;

    /// Whichever route is accurate to ~1e-14 at this t: the configured
    /// cosine truncation when its tail is negligible, otherwise images.
    [[nodiscard]] double eval(double x, double y, double t) const;
    [[nodiscard]] bool cosine_sufficient(double t) const;

    /// Mode decay factor exp(-theta pi^2 m^2 t / r^2).
    [[nodiscard]] double mode_decay(std::size_t m, double t) const;
    [[nodiscard]] double mode_cos(std::size_t m, double x) const;

private:
    void check_point(double x) const;
    void check_time(double t) const;

    double a_;
    double b_;
    double theta_;
    std::size_t terms_;
};

/// A[i][j] = K(x_i, y_j, t) * w_j with trapezoid weights w on a 1D grid.
[[nodiscard]] Eigen::MatrixXd kernel_matrix(const ReflectedHeatKernel& k, const Grid& g, double t);

/// Applies the zero-drift reflected heat semigroup to nodal data.
///
/// On a 1D grid this is exactly kernel_matrix(t) * f, evaluated through the
/// cosine modes in O(n M) instead of O(n^2). In 2D the kernel is the tensor
/// product of the per-axis kernels and is applied one axis at a time.
class KernelPropagator {
public:
    KernelPropagator(const Grid& grid, double theta, std::size_t series_terms);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const ReflectedHeatKernel& axis_kernel(std::size_t axis) const { return kernels_.at(axis); }

    /// f -> int K(., y, t) f(y) dy. t == 0 is the identity.
    [[nodiscard]] std::vector<double> apply(const std::vector<double>& f, double t) const;
    [[nodiscard]] GridDensity apply(const GridDensity& f, double t) const;

private:
    struct Axis {
        std::vector<double> x;
        std::vector<double> w;
        std::size_t table_terms = 0;
        std::vector<double> cos_table;  // n x table_terms, row-major
    };

    void apply_axis(std::size_t axis, const double* in, double* out, std::size_t stride, double t) const;

    Grid grid_;
    std::vector<ReflectedHeatKernel> kernels_;
    std::vector<Axis> axes_;
};

}  // namespace rbridge
