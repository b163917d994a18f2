#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rbridge {

/// Axis-aligned closed box [lower_0, upper_0] x ... in one or two dimensions.
class BoxDomain {
public:
    BoxDomain(std::vector<double> lower, std::vector<double> upper);

    static BoxDomain interval(double a, double b) { return BoxDomain({a}, {b}); }
    static BoxDomain square(double a, double b) { return BoxDomain({a, a}, {b, b}); }

    [[nodiscard]] std::size_t dim() const noexcept { return lower_.size(); }
    [[nodiscard]] double lower(std::size_t axis) const { return lower_.at(axis); }
    [[nodiscard]] double upper(std::size_t axis) const { return upper_.at(axis); }
    [[nodiscard]] double length(std::size_t axis) const { return upper(axis) - lower(axis); }
    [[nodiscard]] double volume() const noexcept;

    /// Closed-box membership, no tolerance.
    [[nodiscard]] bool contains(std::span<const double> x) const noexcept;

    bool operator==(const BoxDomain&) const = default;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

/// Uniform tensor lattice over a BoxDomain, boundary nodes included.
///
/// Nodes are stored row-major: in 2D the flat index of (i, j) is i * n_1 + j,
/// so axis 1 varies fastest.
class Grid {
public:
    Grid(BoxDomain domain, std::vector<std::size_t> points_per_axis);

    static Grid uniform(const BoxDomain& domain, std::size_t points);

    [[nodiscard]] const BoxDomain& domain() const noexcept { return domain_; }
    [[nodiscard]] std::size_t dim() const noexcept { return domain_.dim(); }
    [[nodiscard]] std::size_t points(std::size_t axis) const { return points_.at(axis); }
    [[nodiscard]] const std::vector<std::size_t>& points_per_axis() const noexcept { return points_; }
    [[nodiscard]] double spacing(std::size_t axis) const { return spacing_.at(axis); }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }

    [[nodiscard]] double coordinate(std::size_t axis, std::size_t i) const;
    [[nodiscard]] std::vector<double> axis_coordinates(std::size_t axis) const;
    /// Trapezoid weight along one axis (h/2 at the ends, h inside).
    [[nodiscard]] double axis_weight(std::size_t axis, std::size_t i) const;
    [[nodiscard]] std::vector<double> axis_weights(std::size_t axis) const;

    [[nodiscard]] std::array<std::size_t, 2> unflatten(std::size_t node) const noexcept;
    [[nodiscard]] std::size_t flatten(std::size_t i, std::size_t j = 0) const noexcept;

    /// Tensor-product trapezoid weight of a flat node index.
    [[nodiscard]] double weight(std::size_t node) const;
    [[nodiscard]] std::vector<double> weights() const;
    /// Coordinates of a flat node index (length dim()).
    [[nodiscard]] std::array<double, 2> node(std::size_t node) const;

    [[nodiscard]] bool on_boundary(std::size_t node) const noexcept;

    bool operator==(const Grid& other) const {
        return domain_ == other.domain_ && points_ == other.points_;
    }

private:
    BoxDomain domain_;
    std::vector<std::size_t> points_;
    std::vector<double> spacing_;
    std::size_t size_ = 0;
};

}  // namespace rbridge
