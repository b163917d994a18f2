#include <cmath>

#include "rbridge/errors.hpp"
#include "rbridge/fpk.hpp"

namespace rbridge {

double lyapunov_value(const LyapunovFunctional& L, const GridDensity& d) {
    if (!(L.theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
    const Grid& g = d.grid();
    double f = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double rho = d[k];
        const auto x = g.node(k);
        const double v = L.drift.value(std::span<const double>(x.data(), g.dim()));
        // rho log rho -> 0 as rho -> 0
        const double entropy = rho > 0.0 ? rho * std::log(rho) : 0.0;
        f += g.weight(k) * (v * rho + L.theta * entropy);
    }
    return f;
}

GridDensity gibbs_density(const Grid& grid, const DriftSpec& drift, double theta) {
    std::vector<double> v(grid.size());
    double vmin = INFINITY;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.node(k);
        v[k] = drift.value(std::span<const double>(x.data(), grid.dim())) / theta;
        vmin = std::min(vmin, v[k]);
    }
    for (double& e : v) e = std::exp(-(e - vmin));
    return normalize(GridDensity(grid, std::move(v)));
}

}  // namespace rbridge
