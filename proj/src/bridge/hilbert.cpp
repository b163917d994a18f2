#include <algorithm>
#include <cmath>

#include "rbridge/bridge.hpp"
#include "rbridge/errors.hpp"

namespace rbridge {

namespace {

double metric(const GridDensity& u, const GridDensity& v, const GridDensity* support) {
    if (!(u.grid() == v.grid())) throw Error(ErrorCode::DomainMismatch, "Hilbert metric needs a shared grid");
    if (support && !(support->grid() == u.grid())) {
        throw Error(ErrorCode::DomainMismatch, "support lives on a different grid");
    }
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (support && !((*support)[i] > 0.0)) continue;
        if (!(u[i] > 0.0) || !(v[i] > 0.0)) throw Error(ErrorCode::NonPositive, "Hilbert metric needs positive fields");
        // Logs of each side avoid overflow in the ratio for widely ranged factors.
        const double r = std::log(u[i]) - std::log(v[i]);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (lo > hi) return 0.0;
    return hi - lo;
}

}  // namespace

double hilbert_metric(const GridDensity& u, const GridDensity& v) { return metric(u, v, nullptr); }

double hilbert_metric(const GridDensity& u, const GridDensity& v, const GridDensity& support) {
    return metric(u, v, &support);
}

}  // namespace rbridge
