#include "rbridge/errors.hpp"
#include "rbridge/sde.hpp"

namespace rbridge {

SkorokhodStep skorokhod_step(double x_prev, double increment, double a, double b) noexcept {
    const double c = x_prev + increment;
    if (c < a) return {a, a - c, 0.0};
    if (c > b) return {b, 0.0, c - b};
    return {c, 0.0, 0.0};
}

SkorokhodStep skorokhod_step_1d(double x_prev, double increment, const BoxDomain& interval) {
    if (interval.dim() != 1) throw Error(ErrorCode::InvalidArgument, "1D reflection needs an interval");
    return skorokhod_step(x_prev, increment, interval.lower(0), interval.upper(0));
}

ReflectedPath reflect_path(double x0, std::span<const double> increments, const BoxDomain& interval) {
    if (interval.dim() != 1) throw Error(ErrorCode::InvalidArgument, "1D reflection needs an interval");
    if (!interval.contains(std::span<const double>(&x0, 1))) {
        throw Error(ErrorCode::OutOfDomain, "path must start inside the interval");
    }
    ReflectedPath p;
    p.x.reserve(increments.size() + 1);
    p.x.push_back(x0);
    p.lower_local_time.push_back(0.0);
    p.upper_local_time.push_back(0.0);
    for (double inc : increments) {
        const auto s = skorokhod_step(p.x.back(), inc, interval.lower(0), interval.upper(0));
        p.x.push_back(s.x);
        p.lower_local_time.push_back(p.lower_local_time.back() + s.dL);
        p.upper_local_time.push_back(p.upper_local_time.back() + s.dU);
    }
    return p;
}

}  // namespace rbridge
