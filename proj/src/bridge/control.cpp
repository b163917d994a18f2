#include <algorithm>
#include <cmath>

#include "rbridge/bridge.hpp"
#include "rbridge/errors.hpp"

namespace rbridge {

VectorField compute_control(const GridDensity& phi, double theta) {
    const Grid& g = phi.grid();
    if (!(phi.min_value() > 0.0)) throw Error(ErrorCode::NonPositive, "control needs a strictly positive factor");
    std::vector<double> logphi(phi.size());
    for (std::size_t i = 0; i < logphi.size(); ++i) logphi[i] = std::log(phi[i]);

    VectorField u(phi.size(), {0.0, 0.0});
    for (std::size_t axis = 0; axis < g.dim(); ++axis) {
        const std::size_t n = g.points(axis);
        const double scale = 2.0 * theta / (2.0 * g.spacing(axis));
        for (std::size_t node = 0; node < phi.size(); ++node) {
            auto ij = g.unflatten(node);
            const std::size_t i = ij[axis];
            // Zero normal flux on the faces orthogonal to this axis.
            if (i == 0 || i + 1 == n) continue;
            auto up = ij;
            auto dn = ij;
            ++up[axis];
            --dn[axis];
            u[node][axis] = scale * (logphi[g.flatten(up[0], up[1])] - logphi[g.flatten(dn[0], dn[1])]);
        }
    }
    return u;
}

VectorField control_field(const BridgeSolution& sol, double t) {
    if (!(t >= sol.times.front() && t <= sol.times.back())) {
        throw Error(ErrorCode::InvalidArgument, "control requested outside the solved horizon");
    }
    const auto it = std::upper_bound(sol.times.begin(), sol.times.end(), t);
    const std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - sol.times.begin(), 1) - 1,
                                                sol.times.size() - 2);
    const double s = (t - sol.times[k]) / (sol.times[k + 1] - sol.times[k]);
    VectorField u(sol.control[k].size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t c = 0; c < 2; ++c) u[i][c] = (1.0 - s) * sol.control[k][i][c] + s * sol.control[k + 1][i][c];
    }
    return u;
}

}  // namespace rbridge
