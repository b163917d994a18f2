#include <algorithm>
#include <cmath>
#include <random>

#include "rbridge/errors.hpp"
#include "rbridge/fpk.hpp"
#include "rbridge/sde.hpp"

namespace rbridge {

namespace {

constexpr std::uint64_t kSamplerStream = 0xffffffffffffffffULL;

Grid axis_grid(const Grid& g, std::size_t axis) {
    return Grid(BoxDomain::interval(g.domain().lower(axis), g.domain().upper(axis)), {g.points(axis)});
}

}  // namespace

std::vector<std::array<double, 2>> inverse_cdf_sample(const GridDensity& d, std::size_t n, std::uint64_t seed) {
    std::vector<std::array<double, 2>> out;
    if (n == 0) return out;
    out.reserve(n);
    std::mt19937_64 rng(path_seed(seed, kSamplerStream));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const Grid& g = d.grid();
    if (g.dim() == 1) {
        const QuantileFunction q(d);
        for (std::size_t i = 0; i < n; ++i) out.push_back({q(uniform(rng)), 0.0});
        return out;
    }

    const std::size_t n0 = g.points(0);
    const std::size_t n1 = g.points(1);
    const auto w1 = g.axis_weights(1);
    std::vector<double> marginal(n0, 0.0);
    for (std::size_t i = 0; i < n0; ++i) {
        for (std::size_t j = 0; j < n1; ++j) marginal[i] += w1[j] * d[g.flatten(i, j)];
    }
    const Grid g0 = axis_grid(g, 0);
    const Grid g1 = axis_grid(g, 1);
    const QuantileFunction q0(GridDensity(g0, marginal));
    std::vector<double> row(n1);
    for (std::size_t k = 0; k < n; ++k) {
        const double x1 = q0(uniform(rng));
        const double s = (x1 - g.domain().lower(0)) / g.spacing(0);
        const std::size_t i = std::min(static_cast<std::size_t>(std::max(s, 0.0)), n0 - 2);
        const double f = std::clamp(s - static_cast<double>(i), 0.0, 1.0);
        for (std::size_t j = 0; j < n1; ++j) row[j] = (1.0 - f) * d[g.flatten(i, j)] + f * d[g.flatten(i + 1, j)];
        const QuantileFunction q1(GridDensity(g1, row));
        out.push_back({x1, q1(uniform(rng))});
    }
    return out;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "KS statistic of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double interpolate(const GridDensity& d, std::span<const double> x) {
    const Grid& g = d.grid();
    if (x.size() < g.dim() || !g.domain().contains(x.first(g.dim()))) {
        throw Error(ErrorCode::OutOfDomain, "interpolation point outside the box");
    }
    std::array<std::size_t, 2> cell{0, 0};
    std::array<double, 2> frac{0.0, 0.0};
    for (std::size_t a = 0; a < g.dim(); ++a) {
        const double s = (x[a] - g.domain().lower(a)) / g.spacing(a);
        cell[a] = std::min(static_cast<std::size_t>(std::max(s, 0.0)), g.points(a) - 2);
        frac[a] = s - static_cast<double>(cell[a]);
    }
    if (g.dim() == 1) return (1.0 - frac[0]) * d[cell[0]] + frac[0] * d[cell[0] + 1];
    const auto at = [&](std::size_t di, std::size_t dj) { return d[g.flatten(cell[0] + di, cell[1] + dj)]; };
    return (1.0 - frac[0]) * ((1.0 - frac[1]) * at(0, 0) + frac[1] * at(0, 1)) +
           frac[0] * ((1.0 - frac[1]) * at(1, 0) + frac[1] * at(1, 1));
}

GridDensity cell_average(const GridDensity& fine, const Grid& coarse) {
    if (!(fine.grid().domain() == coarse.domain())) throw Error(ErrorCode::DomainMismatch, "grids cover different boxes");
    std::vector<double> out(coarse.size(), 0.0);
    const auto bounds = [&](std::size_t axis, std::size_t i) {
        const double x = coarse.coordinate(axis, i);
        const double h = 0.5 * coarse.spacing(axis);
        return std::array<double, 2>{std::max(x - h, coarse.domain().lower(axis)),
                                     std::min(x + h, coarse.domain().upper(axis))};
    };
    if (coarse.dim() == 1) {
        // Exact integral of the piecewise-linear interpolant.
        const QuantileFunction q(fine);
        const double total = fine.mass();
        for (std::size_t i = 0; i < out.size(); ++i) {
            const auto [lo, hi] = bounds(0, i);
            out[i] = total * (q.cdf(hi) - q.cdf(lo)) / (hi - lo);
        }
        return normalize(GridDensity(coarse, std::move(out)));
    }
    constexpr std::size_t kSub = 8;
    for (std::size_t node = 0; node < out.size(); ++node) {
        const auto [i, j] = coarse.unflatten(node);
        const auto b0 = bounds(0, i);
        const auto b1 = bounds(1, j);
        double sum = 0.0;
        for (std::size_t p = 0; p < kSub; ++p) {
            for (std::size_t q = 0; q < kSub; ++q) {
                const std::array<double, 2> x{b0[0] + (b0[1] - b0[0]) * (static_cast<double>(p) + 0.5) / kSub,
                                              b1[0] + (b1[1] - b1[0]) * (static_cast<double>(q) + 0.5) / kSub};
                sum += interpolate(fine, x);
            }
        }
        out[node] = sum / static_cast<double>(kSub * kSub);
    }
    return normalize(GridDensity(coarse, std::move(out)));
}

}  // namespace rbridge
