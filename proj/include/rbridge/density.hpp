#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rbridge/domain.hpp"

namespace rbridge {

/// Nonnegative nodal field on a Grid.
///
/// Used for probability densities (normalized) as well as for the
/// unnormalized Schrodinger factors. Mass is the tensor trapezoid integral.
class GridDensity {
public:
    GridDensity(Grid grid, std::vector<double> values);

    /// Samples f at every node.
    static GridDensity sample(const Grid& grid, const std::function<double(std::span<const double>)>& f);
    static GridDensity constant(const Grid& grid, double value);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] bool normalized() const noexcept { return normalized_; }
    [[nodiscard]] double mass() const noexcept;
    [[nodiscard]] double max_value() const noexcept;
    [[nodiscard]] double min_value() const noexcept;

    /// Copy with values multiplied by c >= 0; drops the normalized flag.
    [[nodiscard]] GridDensity scaled(double c) const;

private:
    friend GridDensity normalize(const GridDensity& d);

    Grid grid_;
    std::vector<double> values_;
    bool normalized_ = false;
};

[[nodiscard]] double trapezoid_mass(const GridDensity& d) noexcept;

/// Rescales to unit mass. Throws ZeroMass when mass <= 0.
[[nodiscard]] GridDensity normalize(const GridDensity& d);

/// Trapezoid L1 distance between two fields on the same grid.
[[nodiscard]] double l1_distance(const GridDensity& a, const GridDensity& b);
[[nodiscard]] double linf_distance(const GridDensity& a, const GridDensity& b);

/// Nodewise product on a shared grid.
[[nodiscard]] GridDensity hadamard_product(const GridDensity& a, const GridDensity& b);

}  // namespace rbridge
