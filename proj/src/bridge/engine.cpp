#include <algorithm>
#include <cmath>

#include "rbridge/bridge.hpp"
#include "rbridge/errors.hpp"

namespace rbridge {

namespace {

void clamp_roundoff(std::vector<double>& v) {
    for (double& x : v) x = std::max(x, 0.0);
}

void check_times(const std::vector<double>& times) {
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0 && times[k] <= 1.0)) throw Error(ErrorCode::InvalidArgument, "snapshot time outside [0, 1]");
        if (k > 0 && times[k] < times[k - 1]) throw Error(ErrorCode::InvalidArgument, "snapshot times must ascend");
    }
}

}  // namespace

KernelEngine::KernelEngine(const Grid& grid, double theta, std::size_t series_terms)
    : theta_(theta), propagator_(grid, theta, series_terms) {}

KernelEngine::KernelEngine(const ReflectedHeatKernel& kernel, const Grid& grid)
    : theta_(kernel.theta()), propagator_(grid, kernel.theta(), kernel.series_terms()) {
    if (grid.dim() != 1 || grid.domain().lower(0) != kernel.lower() || grid.domain().upper(0) != kernel.upper()) {
        throw Error(ErrorCode::DomainMismatch, "kernel interval differs from the grid");
    }
}

std::vector<double> KernelEngine::backward(const std::vector<double>& phi1) const {
    auto out = propagator_.apply(phi1, 1.0);
    clamp_roundoff(out);
    return out;
}

std::vector<double> KernelEngine::forward(const std::vector<double>& phihat0) const {
    // The reflected heat kernel is symmetric, so both directions coincide.
    auto out = propagator_.apply(phihat0, 1.0);
    clamp_roundoff(out);
    return out;
}

std::vector<std::vector<double>> KernelEngine::backward_snapshots(const std::vector<double>& phi1,
                                                                  const std::vector<double>& times) const {
    check_times(times);
    std::vector<std::vector<double>> out;
    out.reserve(times.size());
    for (double t : times) {
        out.push_back(propagator_.apply(phi1, 1.0 - t));
        clamp_roundoff(out.back());
    }
    return out;
}

std::vector<std::vector<double>> KernelEngine::forward_snapshots(const std::vector<double>& phihat0,
                                                                 const std::vector<double>& times) const {
    check_times(times);
    std::vector<std::vector<double>> out;
    out.reserve(times.size());
    for (double t : times) {
        out.push_back(propagator_.apply(phihat0, t));
        clamp_roundoff(out.back());
    }
    return out;
}

FpkEngine::FpkEngine(const FpkProblem& problem) : stepper_(problem), steps_(0) {
    const double n = 1.0 / problem.dt;
    steps_ = static_cast<std::size_t>(std::llround(n));
    if (steps_ == 0 || std::abs(n - static_cast<double>(steps_)) > 1e-9 * n) {
        throw Error(ErrorCode::InvalidArgument, "time step must divide the unit horizon");
    }
}

double FpkEngine::representable(double t) const {
    return std::round(t * static_cast<double>(steps_)) / static_cast<double>(steps_);
}

std::vector<std::vector<double>> FpkEngine::run(const std::vector<double>& v, MarchMode mode,
                                                const std::vector<std::size_t>& record) const {
    std::vector<std::vector<double>> out;
    out.reserve(record.size());
    auto z = stepper_.to_scaled(v, mode);
    std::size_t next = 0;
    for (std::size_t s = 0;; ++s) {
        while (next < record.size() && record[next] == s) {
            out.push_back(stepper_.from_scaled(z, mode));
            clamp_roundoff(out.back());
            ++next;
        }
        if (next == record.size() || s == steps_) break;
        stepper_.advance_scaled(z);
    }
    return out;
}

std::vector<double> FpkEngine::backward(const std::vector<double>& phi1) const {
    return run(phi1, MarchMode::BackwardFactor, {steps_}).front();
}

std::vector<double> FpkEngine::forward(const std::vector<double>& phihat0) const {
    return run(phihat0, MarchMode::Forward, {steps_}).front();
}

std::vector<std::vector<double>> FpkEngine::backward_snapshots(const std::vector<double>& phi1,
                                                               const std::vector<double>& times) const {
    check_times(times);
    // phi(t) is reached after (1 - t) / dt reversed steps; record in march order.
    std::vector<std::size_t> record(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        record[times.size() - 1 - k] = steps_ - static_cast<std::size_t>(std::llround(times[k] * steps_));
    }
    auto out = run(phi1, MarchMode::BackwardFactor, record);
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<std::vector<double>> FpkEngine::forward_snapshots(const std::vector<double>& phihat0,
                                                              const std::vector<double>& times) const {
    check_times(times);
    std::vector<std::size_t> record(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) record[k] = static_cast<std::size_t>(std::llround(times[k] * steps_));
    return run(phihat0, MarchMode::Forward, record);
}

}  // namespace rbridge
