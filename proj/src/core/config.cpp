#include "rbridge/config.hpp"

#include <cmath>

#include "rbridge/drift.hpp"
#include "rbridge/errors.hpp"

namespace rbridge {

void SolverConfig::validate() const {
    if (!(theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
    if (time_steps == 0) throw Error(ErrorCode::InvalidArgument, "time_steps must be positive");
    if (series_terms == 0) throw Error(ErrorCode::InvalidArgument, "series_terms must be positive");
    if (!(fp_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "fp_tol must be positive");
    if (fp_max_iter == 0) throw Error(ErrorCode::InvalidArgument, "fp_max_iter must be positive");
    if (!(density_floor > 0.0 && density_floor <= 1e-6)) {
        throw Error(ErrorCode::InvalidArgument, "density_floor must lie in (0, 1e-6]");
    }
    if (snapshots < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 snapshots");
}

DriftSpec DriftSpec::from_potential(ScalarField v, GradientField grad_v) {
    if (!v || !grad_v) throw Error(ErrorCode::InvalidArgument, "potential drift needs V and grad V");
    DriftSpec d;
    d.kind = Kind::GradientPotential;
    d.potential = std::move(v);
    d.gradient = std::move(grad_v);
    return d;
}

double DriftSpec::value(std::span<const double> x) const {
    if (kind == Kind::Zero) return 0.0;
    const double v = potential(x);
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "potential is not finite");
    return v;
}

std::array<double, 2> DriftSpec::drift(std::span<const double> x) const {
    if (kind == Kind::Zero) return {0.0, 0.0};
    const auto g = gradient(x);
    return {-g[0], -g[1]};
}

}  // namespace rbridge
