#include <algorithm>
#include <array>
#include <cmath>

#include "rbridge/errors.hpp"
#include "rbridge/fpk.hpp"

namespace rbridge {

QuantileFunction::QuantileFunction(const GridDensity& d) {
    if (d.grid().dim() != 1) throw Error(ErrorCode::DomainMismatch, "quantile function needs a 1D density");
    x_ = d.grid().axis_coordinates(0);
    rho_ = d.values();
    cdf_.assign(x_.size(), 0.0);
    for (std::size_t k = 1; k < x_.size(); ++k) {
        cdf_[k] = cdf_[k - 1] + 0.5 * (rho_[k - 1] + rho_[k]) * (x_[k] - x_[k - 1]);
    }
    const double total = cdf_.back();
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "quantile function of a zero field");
    for (double& c : cdf_) c /= total;
    for (double& r : rho_) r /= total;
    cdf_.back() = 1.0;
}

double QuantileFunction::operator()(double q) const {
    q = std::clamp(q, 0.0, 1.0);
    // First cell whose right CDF value exceeds q; zero-mass cells are skipped.
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), q);
    if (it == cdf_.end()) {
        // q == 1: rightmost point carrying mass.
        std::size_t k = cdf_.size() - 1;
        while (k > 0 && cdf_[k - 1] >= 1.0) --k;
        return x_[k];
    }
    const auto k = static_cast<std::size_t>(it - cdf_.begin()) - 1;
    const double h = x_[k + 1] - x_[k];
    const double c = q - cdf_[k];
    const double r0 = rho_[k];
    const double slope = (rho_[k + 1] - r0) / h;
    // Root of r0 s + slope s^2 / 2 = c in the cancellation-free form.
    const double disc = std::max(r0 * r0 + 2.0 * slope * c, 0.0);
    const double denom = r0 + std::sqrt(disc);
    const double s = denom > 0.0 ? 2.0 * c / denom : 0.0;
    return x_[k] + std::clamp(s, 0.0, h);
}

double QuantileFunction::cdf(double x) const {
    if (x <= x_.front()) return 0.0;
    if (x >= x_.back()) return 1.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const auto k = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[k + 1] - x_[k];
    const double s = x - x_[k];
    const double slope = (rho_[k + 1] - rho_[k]) / h;
    return std::min(1.0, cdf_[k] + rho_[k] * s + 0.5 * slope * s * s);
}

double wasserstein1d(const GridDensity& d1, const GridDensity& d2) {
    if (d1.grid().dim() != 1 || d2.grid().dim() != 1) {
        throw Error(ErrorCode::DomainMismatch, "wasserstein1d needs 1D densities");
    }
    const QuantileFunction q1(d1);
    const QuantileFunction q2(d2);

    std::vector<double> breaks;
    breaks.reserve(q1.cdf_nodes().size() + q2.cdf_nodes().size());
    breaks.insert(breaks.end(), q1.cdf_nodes().begin(), q1.cdf_nodes().end());
    breaks.insert(breaks.end(), q2.cdf_nodes().begin(), q2.cdf_nodes().end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // 5-point Gauss-Legendre on each interval where both quantiles are smooth.
    static constexpr std::array<double, 5> nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                    0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> weights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                      0.4786286704993665, 0.2369268850561891};
    double w2 = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double lo = breaks[k];
        const double hi = breaks[k + 1];
        if (!(hi > lo)) continue;
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        for (std::size_t g = 0; g < nodes.size(); ++g) {
            const double q = mid + half * nodes[g];
            const double diff = q1(q) - q2(q);
            w2 += half * weights[g] * diff * diff;
        }
    }
    return std::sqrt(w2);
}

}  // namespace rbridge
