#include <algorithm>
#include <cmath>

#include "rbridge/errors.hpp"
#include "rbridge/sde.hpp"

namespace rbridge {

ControlField::ControlField(Grid grid, std::vector<double> times, std::vector<VectorField> snapshots)
    : grid_(std::move(grid)), times_(std::move(times)), snapshots_(std::move(snapshots)) {
    if (times_.size() < 2 || times_.size() != snapshots_.size()) {
        throw Error(ErrorCode::InvalidArgument, "control needs at least two snapshots with matching times");
    }
    for (std::size_t k = 0; k < times_.size(); ++k) {
        if (k > 0 && !(times_[k] > times_[k - 1])) throw Error(ErrorCode::InvalidArgument, "control times must increase");
        if (snapshots_[k].size() != grid_.size()) throw Error(ErrorCode::DomainMismatch, "control snapshot size mismatch");
    }
}

ControlField ControlField::from_solution(const BridgeSolution& sol) {
    return ControlField(sol.grid(), sol.times, sol.control);
}

std::array<double, 2> ControlField::operator()(double t, std::span<const double> x) const {
    const std::size_t dim = grid_.dim();
    if (x.size() < dim || !grid_.domain().contains(x.first(dim))) {
        throw Error(ErrorCode::ControlOutOfRange, "control queried outside the box");
    }
    if (!(t >= times_.front() && t <= times_.back())) {
        throw Error(ErrorCode::ControlOutOfRange, "control queried outside its time span");
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - times_.begin()) - 1, times_.size() - 2);
    const double st = (t - times_[k]) / (times_[k + 1] - times_[k]);

    std::array<std::size_t, 2> cell{0, 0};
    std::array<double, 2> frac{0.0, 0.0};
    for (std::size_t a = 0; a < dim; ++a) {
        const double s = (x[a] - grid_.domain().lower(a)) / grid_.spacing(a);
        cell[a] = std::min(static_cast<std::size_t>(std::max(s, 0.0)), grid_.points(a) - 2);
        frac[a] = s - static_cast<double>(cell[a]);
    }

    std::array<double, 2> u{0.0, 0.0};
    const std::size_t corners = dim == 1 ? 2 : 4;
    for (std::size_t c = 0; c < corners; ++c) {
        const std::size_t di = c & 1U;
        const std::size_t dj = (c >> 1U) & 1U;
        double w = di ? frac[0] : 1.0 - frac[0];
        if (dim == 2) w *= dj ? frac[1] : 1.0 - frac[1];
        if (w == 0.0) continue;
        const std::size_t node = grid_.flatten(cell[0] + di, cell[1] + dj);
        for (std::size_t a = 0; a < dim; ++a) {
            u[a] += w * ((1.0 - st) * snapshots_[k][node][a] + st * snapshots_[k + 1][node][a]);
        }
    }
    for (std::size_t a = 0; a < dim; ++a) {
        if (cell[a] == 0 && u[a] < 0.0) u[a] = 0.0;
        if (cell[a] + 2 == grid_.points(a) && u[a] > 0.0) u[a] = 0.0;
    }
    return u;
}

}  // namespace rbridge
