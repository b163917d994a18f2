#include <algorithm>
#include <cmath>
#include <string>

#include "rbridge/errors.hpp"
#include "rbridge/fpk.hpp"

namespace rbridge {

namespace {

constexpr std::size_t kMaxNewton = 200;
constexpr double kResidualStop = 1e-11;
constexpr double kResidualFail = 1e-9;

// In-place Cholesky solve of a symmetric positive definite matrix with two
// off-diagonal bands: b0 diagonal, b1[i] = H(i, i+1), b2[i] = H(i, i+2).
void solve_pentadiagonal(std::vector<double> b0, std::vector<double> b1, std::vector<double> b2,
                         std::vector<double>& rhs) {
    const std::size_t m = b0.size();
    // L has diagonal l0 and sub-bands l1, l2 (stored over b0, b1, b2).
    for (std::size_t i = 0; i < m; ++i) {
        double d = b0[i];
        if (i >= 1) d -= b1[i - 1] * b1[i - 1];
        if (i >= 2) d -= b2[i - 2] * b2[i - 2];
        if (!(d > 0.0)) throw Error(ErrorCode::ProxNoConverge, "prox Hessian lost positive definiteness");
        b0[i] = std::sqrt(d);
        if (i + 1 < m) {
            double s = b1[i];
            if (i >= 1) s -= b2[i - 1] * b1[i - 1];
            b1[i] = s / b0[i];
        }
        if (i + 2 < m) b2[i] = b2[i] / b0[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
        double s = rhs[i];
        if (i >= 1) s -= b1[i - 1] * rhs[i - 1];
        if (i >= 2) s -= b2[i - 2] * rhs[i - 2];
        rhs[i] = s / b0[i];
    }
    for (std::size_t i = m; i-- > 0;) {
        double s = rhs[i];
        if (i + 1 < m) s -= b1[i] * rhs[i + 1];
        if (i + 2 < m) s -= b2[i] * rhs[i + 2];
        rhs[i] = s / b0[i];
    }
}

std::vector<double> volumes(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> v(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double half = 0.5 * (x[k + 1] - x[k]);
        v[k] += half;
        v[k + 1] += half;
    }
    return v;
}

double potential(const DriftSpec& drift, double x) { return drift.value(std::span<const double>(&x, 1)); }

double potential_slope(const DriftSpec& drift, double x) {
    if (drift.is_zero()) return 0.0;
    return drift.gradient(std::span<const double>(&x, 1))[0];
}

}  // namespace

LagrangianDensity::LagrangianDensity(const GridDensity& d) {
    if (d.grid().dim() != 1) throw Error(ErrorCode::DomainMismatch, "particle density needs a 1D grid");
    if (!(d.min_value() > 0.0)) throw Error(ErrorCode::NonPositive, "prox step needs a strictly positive density");
    const GridDensity n = normalize(d);
    x_ = d.grid().axis_coordinates(0);
    nu_.resize(x_.size());
    for (std::size_t k = 0; k < x_.size(); ++k) nu_[k] = d.grid().axis_weight(0, k) * n[k];
}

std::vector<double> LagrangianDensity::control_volumes() const { return volumes(x_); }

double LagrangianDensity::free_energy(const DriftSpec& drift, double theta) const {
    const auto v = volumes(x_);
    double f = 0.0;
    for (std::size_t k = 0; k < x_.size(); ++k) {
        f += nu_[k] * potential(drift, x_[k]) + theta * nu_[k] * std::log(nu_[k] / v[k]);
    }
    return f;
}

GridDensity LagrangianDensity::to_grid(const Grid& grid) const {
    const auto v = volumes(x_);
    std::vector<double> rho(x_.size());
    for (std::size_t k = 0; k < x_.size(); ++k) rho[k] = nu_[k] / v[k];
    const auto gx = grid.axis_coordinates(0);
    std::vector<double> out(gx.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        while (k + 2 < x_.size() && x_[k + 1] < gx[i]) ++k;
        const double s = std::clamp((gx[i] - x_[k]) / (x_[k + 1] - x_[k]), 0.0, 1.0);
        out[i] = (1.0 - s) * rho[k] + s * rho[k + 1];
    }
    return normalize(GridDensity(grid, std::move(out)));
}

LagrangianDensity LagrangianDensity::prox(const DriftSpec& drift, double theta, double tau) const {
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "prox step size must be positive");
    const std::size_t n = x_.size();
    const std::size_t kk = n - 1;
    const std::size_t m = n - 2;  // free interior nodes
    const std::vector<double>& x0 = x_;
    const std::vector<double>& nu = nu_;
    const double eps = 1e-5 * (x_.back() - x_.front());

    auto objective = [&](const std::vector<double>& x) {
        const auto v = volumes(x);
        double f = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double dx = x[k] - x0[k];
            f += 0.5 * nu[k] * dx * dx + tau * nu[k] * potential(drift, x[k]) - tau * theta * nu[k] * std::log(v[k]);
        }
        return f;
    };

    std::vector<double> x = x0;
    double residual = INFINITY;
    for (std::size_t iter = 0; iter < kMaxNewton; ++iter) {
        const auto v = volumes(x);
        std::vector<double> grad(m);
        std::vector<double> b0(m, 0.0);
        std::vector<double> b1(m > 0 ? m - 1 : 0, 0.0);
        std::vector<double> b2(m > 1 ? m - 2 : 0, 0.0);
        residual = 0.0;
        for (std::size_t j = 1; j < kk; ++j) {
            const double slope = potential_slope(drift, x[j]);
            const double g = nu[j] * (x[j] - x0[j]) + tau * nu[j] * slope -
                             0.5 * tau * theta * (nu[j - 1] / v[j - 1] - nu[j + 1] / v[j + 1]);
            grad[j - 1] = g;
            residual = std::isnan(g) ? INFINITY : std::max(residual, std::abs(g) / nu[j]);
            double curv = 0.0;
            if (!drift.is_zero()) {
                curv = (potential_slope(drift, x[j] + eps) - potential_slope(drift, x[j] - eps)) / (2.0 * eps);
            }
            b0[j - 1] += nu[j] * std::max(1.0 + tau * curv, 0.5);
        }
        if (residual < kResidualStop) break;

        // Entropy Hessian: sum_k tau theta nu_k / v_k^2 grad(v_k) grad(v_k)^T.
        for (std::size_t k = 0; k < n; ++k) {
            const double c = 0.25 * tau * theta * nu[k] / (v[k] * v[k]);
            // grad v_k has -1/2 at max(k-1, 0) and +1/2 at min(k+1, K); pinned ends drop out.
            const std::size_t lo = k == 0 ? 0 : k - 1;
            const std::size_t hi = k == kk ? kk : k + 1;
            const bool lo_free = lo >= 1 && lo < kk;
            const bool hi_free = hi >= 1 && hi < kk;
            if (lo_free) b0[lo - 1] += c;
            if (hi_free) b0[hi - 1] += c;
            if (lo_free && hi_free && hi != lo) {
                if (hi - lo == 2) b2[lo - 1] -= c; else b1[lo - 1] -= c;
            }
        }

        std::vector<double> step(grad);
        for (double& s : step) s = -s;
        solve_pentadiagonal(b0, b1, b2, step);

        double slope_dir = 0.0;
        for (std::size_t i = 0; i < m; ++i) slope_dir += grad[i] * step[i];
        const double f0 = objective(x);
        double alpha = 1.0;
        std::vector<double> trial(x);
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            for (std::size_t j = 1; j < kk; ++j) trial[j] = x[j] + alpha * step[j - 1];
            bool monotone = true;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                if (!(trial[k + 1] > trial[k])) { monotone = false; break; }
            }
            if (monotone && objective(trial) <= f0 + 1e-4 * alpha * slope_dir + 1e-14 * std::abs(f0)) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        x.swap(trial);
    }
    if (!(residual <= kResidualFail)) {
        throw Error(ErrorCode::ProxNoConverge, "prox Newton residual " + std::to_string(residual) + " above 1e-9");
    }
    LagrangianDensity out;
    out.x_ = std::move(x);
    out.nu_ = nu_;
    return out;
}

GridDensity prox_step_jko(const FpkProblem& p, const GridDensity& d, double tau) {
    if (p.grid.dim() != 1) throw Error(ErrorCode::InvalidArgument, "Wasserstein prox is implemented in 1D only");
    return LagrangianDensity(d).prox(p.drift, p.theta, tau).to_grid(p.grid);
}

GridDensity jko_march(const FpkProblem& p, const GridDensity& d0, double tau, std::size_t steps) {
    if (p.grid.dim() != 1) throw Error(ErrorCode::InvalidArgument, "Wasserstein prox is implemented in 1D only");
    LagrangianDensity state(d0);
    for (std::size_t s = 0; s < steps; ++s) state = state.prox(p.drift, p.theta, tau);
    return state.to_grid(p.grid);
}

}  // namespace rbridge
