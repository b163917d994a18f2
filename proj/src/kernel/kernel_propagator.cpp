#include <algorithm>
#include <cmath>

#include "rbridge/errors.hpp"
#include "rbridge/kernel.hpp"

namespace rbridge {

namespace {
constexpr double kModeTol = 1e-14;
}

KernelPropagator::KernelPropagator(const Grid& grid, double theta, std::size_t series_terms) : grid_(grid) {
    for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
        kernels_.emplace_back(grid.domain().lower(axis), grid.domain().upper(axis), theta, series_terms);
        Axis ax;
        ax.x = grid.axis_coordinates(axis);
        ax.w = grid.axis_weights(axis);
        ax.table_terms = series_terms;
        ax.cos_table.resize(ax.x.size() * series_terms);
        for (std::size_t i = 0; i < ax.x.size(); ++i) {
            for (std::size_t m = 1; m <= series_terms; ++m) {
                ax.cos_table[i * series_terms + (m - 1)] = kernels_.back().mode_cos(m, ax.x[i]);
            }
        }
        axes_.push_back(std::move(ax));
    }
}

void KernelPropagator::apply_axis(std::size_t axis, const double* in, double* out, std::size_t stride,
                                  double t) const {
    const Axis& ax = axes_[axis];
    const ReflectedHeatKernel& k = kernels_[axis];
    const std::size_t n = ax.x.size();
    const double r = k.length();

    std::size_t terms = 0;
    bool use_modes = true;
    if (k.cosine_sufficient(t)) {
        terms = k.series_terms();
    } else {
        try {
            terms = k.required_terms(t, kModeTol);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Diverged) throw;
            use_modes = false;
        }
    }

    if (!use_modes) {
        const std::size_t images = k.required_images(t, kModeTol);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += k.eval_images(ax.x[i], ax.x[j], t, images) * ax.w[j] * in[j * stride];
            out[i * stride] = s;
        }
        return;
    }

    auto cos_at = [&](std::size_t i, std::size_t m) {
        return m <= ax.table_terms ? ax.cos_table[i * ax.table_terms + (m - 1)] : k.mode_cos(m, ax.x[i]);
    };

    double mean = 0.0;
    std::vector<double> coeff(terms, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double wf = ax.w[j] * in[j * stride];
        mean += wf;
        for (std::size_t m = 1; m <= terms; ++m) coeff[m - 1] += wf * cos_at(j, m);
    }
    for (std::size_t m = 1; m <= terms; ++m) coeff[m - 1] *= k.mode_decay(m, t);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t m = 1; m <= terms; ++m) s += coeff[m - 1] * cos_at(i, m);
        out[i * stride] = (mean + 2.0 * s) / r;
    }
}

std::vector<double> KernelPropagator::apply(const std::vector<double>& f, double t) const {
    if (f.size() != grid_.size()) throw Error(ErrorCode::DomainMismatch, "propagator input size mismatch");
    if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "propagation time must be nonnegative");
    if (t == 0.0) return f;
    if (grid_.dim() == 1) {
        std::vector<double> out(f.size());
        apply_axis(0, f.data(), out.data(), 1, t);
        return out;
    }
    const std::size_t n0 = grid_.points(0);
    const std::size_t n1 = grid_.points(1);
    std::vector<double> tmp(f.size());
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < n0; ++i) apply_axis(1, f.data() + i * n1, tmp.data() + i * n1, 1, t);
    for (std::size_t j = 0; j < n1; ++j) apply_axis(0, tmp.data() + j, out.data() + j, n1, t);
    return out;
}

GridDensity KernelPropagator::apply(const GridDensity& f, double t) const {
    if (!(f.grid() == grid_)) throw Error(ErrorCode::DomainMismatch, "propagator grid mismatch");
    auto v = apply(f.values(), t);
    // Truncated series can leave roundoff-level negatives where the kernel is ~0.
    for (double& x : v) x = std::max(x, 0.0);
    return GridDensity(grid_, std::move(v));
}

}  // namespace rbridge
