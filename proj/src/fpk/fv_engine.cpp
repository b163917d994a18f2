#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <string>

#include "rbridge/errors.hpp"
#include "rbridge/fpk.hpp"

namespace rbridge {

namespace {

// delta / (exp(delta) - 1)
double bernoulli(double delta) {
    if (std::abs(delta) < 1e-8) return 1.0 - 0.5 * delta;
    return delta / std::expm1(delta);
}

// delta / (2 sinh(delta / 2)); symmetric in delta.
double symmetric_flux_weight(double delta) {
    const double a = std::abs(delta);
    if (a < 1e-6) return 1.0 - a * a / 24.0;
    return a * std::exp(-0.5 * a) / (-std::expm1(-a));
}

}  // namespace

FpkProblem::FpkProblem(Grid g, DriftSpec f, double theta_, double dt_)
    : grid(std::move(g)), drift(std::move(f)), theta(theta_), dt(dt_) {
    if (!(theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "fpk theta must be positive");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "fpk dt must be positive");
}

double FpkProblem::diffusion_number() const {
    double d = 0.0;
    for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
        const double h = grid.spacing(axis);
        d = std::max(d, dt * theta / (h * h));
    }
    return d;
}

struct FvStepper::SparseFactor {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
};

FvStepper::FvStepper(const FpkProblem& problem) : problem_(problem) {
    const Grid& g = problem_.grid;
    const std::size_t n = g.size();
    const double theta = problem_.theta;
    diffusion_number_ = problem_.diffusion_number();

    v_over_theta_.resize(n);
    sqrt_w_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto x = g.node(k);
        v_over_theta_[k] = problem_.drift.value(std::span<const double>(x.data(), g.dim())) / theta;
        sqrt_w_[k] = std::sqrt(g.weight(k));
    }

    diag_.assign(n, 0.0);
    auto add_face = [&](std::size_t i, std::size_t j, double conductance) {
        // conductance = theta * face_area / h
        const double delta = v_over_theta_[j] - v_over_theta_[i];
        const double wi = sqrt_w_[i] * sqrt_w_[i];
        const double wj = sqrt_w_[j] * sqrt_w_[j];
        edges_.push_back({i, j, conductance * symmetric_flux_weight(delta) / (sqrt_w_[i] * sqrt_w_[j])});
        diag_[i] -= conductance * bernoulli(delta) / wi;
        diag_[j] -= conductance * bernoulli(-delta) / wj;
    };

    if (g.dim() == 1) {
        const double h = g.spacing(0);
        for (std::size_t i = 0; i + 1 < n; ++i) add_face(i, i + 1, theta / h);
    } else {
        const std::size_t n0 = g.points(0);
        const std::size_t n1 = g.points(1);
        const double h0 = g.spacing(0);
        const double h1 = g.spacing(1);
        for (std::size_t i = 0; i < n0; ++i) {
            for (std::size_t j = 0; j < n1; ++j) {
                const std::size_t k = g.flatten(i, j);
                if (i + 1 < n0) add_face(k, g.flatten(i + 1, j), theta * g.axis_weight(1, j) / h0);
                if (j + 1 < n1) add_face(k, g.flatten(i, j + 1), theta * g.axis_weight(0, i) / h1);
            }
        }
    }

    const double dt = problem_.dt;
    if (g.dim() == 1) {
        // Edges are (i, i+1) in order.
        ldl_d_.resize(n);
        ldl_l_.resize(n > 0 ? n - 1 : 0);
        ldl_d_[0] = 1.0 - dt * diag_[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double off = -dt * edges_[i - 1].value;
            ldl_l_[i - 1] = off / ldl_d_[i - 1];
            ldl_d_[i] = 1.0 - dt * diag_[i] - ldl_l_[i - 1] * off;
            if (!(ldl_d_[i] > 0.0)) throw Error(ErrorCode::LinearSolveFailure, "tridiagonal pivot not positive");
        }
    } else {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(n + 2 * edges_.size());
        for (std::size_t k = 0; k < n; ++k) {
            triplets.emplace_back(static_cast<int>(k), static_cast<int>(k), 1.0 - dt * diag_[k]);
        }
        for (const Edge& e : edges_) {
            triplets.emplace_back(static_cast<int>(e.i), static_cast<int>(e.j), -dt * e.value);
            triplets.emplace_back(static_cast<int>(e.j), static_cast<int>(e.i), -dt * e.value);
        }
        Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        m.setFromTriplets(triplets.begin(), triplets.end());
        auto factor = std::make_shared<SparseFactor>();
        factor->solver.compute(m);
        if (factor->solver.info() != Eigen::Success) {
            throw Error(ErrorCode::LinearSolveFailure, "sparse LDL^T factorization failed");
        }
        sparse_ = std::move(factor);
    }
}

void FvStepper::advance_scaled(std::vector<double>& z) const {
    const std::size_t n = z.size();
    if (n != grid().size()) throw Error(ErrorCode::DomainMismatch, "state size does not match grid");
    if (grid().dim() == 1) {
        for (std::size_t i = 1; i < n; ++i) z[i] -= ldl_l_[i - 1] * z[i - 1];
        for (std::size_t i = 0; i < n; ++i) z[i] /= ldl_d_[i];
        for (std::size_t i = n - 1; i-- > 0;) z[i] -= ldl_l_[i] * z[i + 1];
        return;
    }
    Eigen::Map<Eigen::VectorXd> v(z.data(), static_cast<Eigen::Index>(n));
    v = sparse_->solver.solve(v).eval();
    if (sparse_->solver.info() != Eigen::Success) throw Error(ErrorCode::LinearSolveFailure, "sparse solve failed");
}

std::vector<double> FvStepper::to_scaled(const std::vector<double>& v, MarchMode mode) const {
    const double sign = mode == MarchMode::Forward ? 0.5 : -0.5;
    std::vector<double> z(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) z[k] = sqrt_w_[k] * std::exp(sign * v_over_theta_[k]) * v[k];
    return z;
}

std::vector<double> FvStepper::from_scaled(const std::vector<double>& z, MarchMode mode) const {
    const double sign = mode == MarchMode::Forward ? -0.5 : 0.5;
    std::vector<double> v(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) v[k] = std::exp(sign * v_over_theta_[k]) * z[k] / sqrt_w_[k];
    return v;
}

GridDensity FvStepper::to_density(std::vector<double> v) const {
    // The M-matrix inverse is nonnegative; fill-in in the sparse factor can
    // still leave roundoff-sized negatives.
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    for (double& x : v) {
        if (x < 0.0) {
            if (x < -1e-10 * peak) throw Error(ErrorCode::LinearSolveFailure, "step produced a negative value");
            x = 0.0;
        }
    }
    return GridDensity(grid(), std::move(v));
}

GridDensity FvStepper::step_forward(const GridDensity& d) const {
    if (!(d.grid() == grid())) throw Error(ErrorCode::DomainMismatch, "density grid differs from problem grid");
    auto z = to_scaled(d.values(), MarchMode::Forward);
    advance_scaled(z);
    return to_density(from_scaled(z, MarchMode::Forward));
}

GridDensity FvStepper::step_backward_factor(const GridDensity& phi) const {
    if (!(phi.grid() == grid())) throw Error(ErrorCode::DomainMismatch, "factor grid differs from problem grid");
    if (!(phi.min_value() > 0.0)) throw Error(ErrorCode::NonPositive, "backward factor must be strictly positive");
    auto z = to_scaled(phi.values(), MarchMode::BackwardFactor);
    advance_scaled(z);
    return to_density(from_scaled(z, MarchMode::BackwardFactor));
}

GridDensity FvStepper::to_p(const GridDensity& phi) const {
    std::vector<double> v(phi.values());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= std::exp(-v_over_theta_[k]);
    return GridDensity(grid(), std::move(v));
}

GridDensity FvStepper::from_p(const GridDensity& p) const {
    std::vector<double> v(p.values());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= std::exp(v_over_theta_[k]);
    return GridDensity(grid(), std::move(v));
}

std::vector<GridDensity> FvStepper::march(const GridDensity& d0, double t0, double t1, MarchMode mode,
                                          std::size_t record_every) const {
    if (!(t0 <= t1)) throw Error(ErrorCode::InvalidArgument, "march needs t0 <= t1");
    if (record_every == 0) throw Error(ErrorCode::InvalidArgument, "record_every must be positive");
    if (!(d0.grid() == grid())) throw Error(ErrorCode::DomainMismatch, "density grid differs from problem grid");
    std::vector<GridDensity> out{d0};
    if (t0 == t1) return out;
    if (mode == MarchMode::BackwardFactor && !(d0.min_value() > 0.0)) {
        throw Error(ErrorCode::NonPositive, "backward factor must be strictly positive");
    }

    const double span = t1 - t0;
    const auto steps = static_cast<std::size_t>(std::ceil(span / dt() - 1e-9));
    const double step_dt = span / static_cast<double>(steps);
    if (std::abs(step_dt - dt()) > 1e-12 * dt()) {
        FpkProblem adjusted = problem_;
        adjusted.dt = step_dt;
        return FvStepper(adjusted).march(d0, t0, t1, mode, record_every);
    }

    auto z = to_scaled(d0.values(), mode);
    for (std::size_t s = 1; s <= steps; ++s) {
        advance_scaled(z);
        if (s % record_every == 0 || s == steps) out.push_back(to_density(from_scaled(z, mode)));
    }
    return out;
}

std::vector<double> FvStepper::generator_dense() const {
    const std::size_t n = grid().size();
    std::vector<double> a(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) a[k * n + k] = diag_[k];
    for (const Edge& e : edges_) {
        a[e.i * n + e.j] = e.value;
        a[e.j * n + e.i] = e.value;
    }
    return a;
}

GridDensity step_forward(const FpkProblem& p, const GridDensity& d) { return FvStepper(p).step_forward(d); }

GridDensity step_backward_factor(const FpkProblem& p, const GridDensity& d) {
    return FvStepper(p).step_backward_factor(d);
}

std::vector<GridDensity> march(const FpkProblem& p, const GridDensity& d0, double t0, double t1, MarchMode mode) {
    return FvStepper(p).march(d0, t0, t1, mode);
}

}  // namespace rbridge
