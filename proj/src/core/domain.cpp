#include "rbridge/domain.hpp"

#include <string>

#include "rbridge/errors.hpp"

namespace rbridge {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ZeroMass: return "ZeroMass";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
        case ErrorCode::DomainMismatch: return "DomainMismatch";
        case ErrorCode::ProxNoConverge: return "ProxNoConverge";
        case ErrorCode::NonPositive: return "NonPositive";
        case ErrorCode::FloorDominant: return "FloorDominant";
        case ErrorCode::MaxIterations: return "MaxIterations";
        case ErrorCode::ControlOutOfRange: return "ControlOutOfRange";
        case ErrorCode::MissingSolution: return "MissingSolution";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

BoxDomain::BoxDomain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size() || lower_.empty() || lower_.size() > 2) {
        throw Error(ErrorCode::InvalidArgument, "box must be 1D or 2D with matching bounds");
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (!(lower_[i] < upper_[i])) {
            throw Error(ErrorCode::InvalidArgument,
                        "box axis " + std::to_string(i) + " needs lower < upper");
        }
    }
}

double BoxDomain::volume() const noexcept {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= upper_[i] - lower_[i];
    return v;
}

bool BoxDomain::contains(std::span<const double> x) const noexcept {
    if (x.size() < dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
    }
    return true;
}

Grid::Grid(BoxDomain domain, std::vector<std::size_t> points_per_axis)
    : domain_(std::move(domain)), points_(std::move(points_per_axis)) {
    if (points_.size() != domain_.dim()) {
        throw Error(ErrorCode::InvalidArgument, "points_per_axis length must equal domain dim");
    }
    size_ = 1;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i] < 3) {
            throw Error(ErrorCode::InvalidArgument, "grid needs at least 3 points per axis");
        }
        spacing_.push_back(domain_.length(i) / static_cast<double>(points_[i] - 1));
        size_ *= points_[i];
    }
}

Grid Grid::uniform(const BoxDomain& domain, std::size_t points) {
    return Grid(domain, std::vector<std::size_t>(domain.dim(), points));
}

double Grid::coordinate(std::size_t axis, std::size_t i) const {
    // Pin the last node to the upper bound so boundary nodes are exact.
    if (i + 1 == points_[axis]) return domain_.upper(axis);
    return domain_.lower(axis) + static_cast<double>(i) * spacing_[axis];
}

std::vector<double> Grid::axis_coordinates(std::size_t axis) const {
    std::vector<double> x(points_.at(axis));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = coordinate(axis, i);
    return x;
}

double Grid::axis_weight(std::size_t axis, std::size_t i) const {
    const double h = spacing_.at(axis);
    return (i == 0 || i + 1 == points_[axis]) ? 0.5 * h : h;
}

std::vector<double> Grid::axis_weights(std::size_t axis) const {
    std::vector<double> w(points_.at(axis));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = axis_weight(axis, i);
    return w;
}

std::array<std::size_t, 2> Grid::unflatten(std::size_t node) const noexcept {
    if (dim() == 1) return {node, 0};
    return {node / points_[1], node % points_[1]};
}

std::size_t Grid::flatten(std::size_t i, std::size_t j) const noexcept {
    return dim() == 1 ? i : i * points_[1] + j;
}

double Grid::weight(std::size_t node) const {
    const auto [i, j] = unflatten(node);
    return dim() == 1 ? axis_weight(0, i) : axis_weight(0, i) * axis_weight(1, j);
}

std::vector<double> Grid::weights() const {
    std::vector<double> w(size_);
    for (std::size_t k = 0; k < size_; ++k) w[k] = weight(k);
    return w;
}

std::array<double, 2> Grid::node(std::size_t node) const {
    const auto [i, j] = unflatten(node);
    if (dim() == 1) return {coordinate(0, i), 0.0};
    return {coordinate(0, i), coordinate(1, j)};
}

bool Grid::on_boundary(std::size_t node) const noexcept {
    const auto [i, j] = unflatten(node);
    if (i == 0 || i + 1 == points_[0]) return true;
    return dim() == 2 && (j == 0 || j + 1 == points_[1]);
}

}  // namespace rbridge
