#include "rbridge/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbridge/errors.hpp"

namespace rbridge {

GridDensity::GridDensity(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw Error(ErrorCode::InvalidArgument, "value count does not match grid size");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
            throw Error(ErrorCode::InvalidArgument,
                        "density value at node " + std::to_string(i) + " is negative or not finite");
        }
    }
}

GridDensity GridDensity::sample(const Grid& grid, const std::function<double(std::span<const double>)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.node(k);
        v[k] = f(std::span<const double>(x.data(), grid.dim()));
    }
    return GridDensity(grid, std::move(v));
}

GridDensity GridDensity::constant(const Grid& grid, double value) {
    return GridDensity(grid, std::vector<double>(grid.size(), value));
}

double GridDensity::mass() const noexcept { return trapezoid_mass(*this); }

double GridDensity::max_value() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

double GridDensity::min_value() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

GridDensity GridDensity::scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return GridDensity(grid_, std::move(v));
}

double trapezoid_mass(const GridDensity& d) noexcept {
    const Grid& g = d.grid();
    const auto& v = d.values();
    if (g.dim() == 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += g.axis_weight(0, i) * v[i];
        return s;
    }
    // Row sums first, then the outer axis.
    const std::size_t n0 = g.points(0);
    const std::size_t n1 = g.points(1);
    const auto w1 = g.axis_weights(1);
    double s = 0.0;
    for (std::size_t i = 0; i < n0; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n1; ++j) row += w1[j] * v[i * n1 + j];
        s += g.axis_weight(0, i) * row;
    }
    return s;
}

GridDensity normalize(const GridDensity& d) {
    const double m = trapezoid_mass(d);
    if (!(m > 0.0)) throw Error(ErrorCode::ZeroMass, "cannot normalize a field with mass <= 0");
    GridDensity out = d.scaled(1.0 / m);
    out.normalized_ = true;
    return out;
}

namespace {
void require_same_grid(const GridDensity& a, const GridDensity& b) {
    if (!(a.grid() == b.grid())) throw Error(ErrorCode::DomainMismatch, "fields live on different grids");
}
}  // namespace

double l1_distance(const GridDensity& a, const GridDensity& b) {
    require_same_grid(a, b);
    const auto w = a.grid().weights();
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * std::abs(a[k] - b[k]);
    return s;
}

double linf_distance(const GridDensity& a, const GridDensity& b) {
    require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
    return s;
}

GridDensity hadamard_product(const GridDensity& a, const GridDensity& b) {
    require_same_grid(a, b);
    std::vector<double> v(a.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] * b[k];
    return GridDensity(a.grid(), std::move(v));
}

}  // namespace rbridge
