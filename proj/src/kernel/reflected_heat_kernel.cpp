#include <cmath>
#include <numbers>
#include <string>

#include "rbridge/errors.hpp"
#include "rbridge/kernel.hpp"

namespace rbridge {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kAutoTol = 1e-14;
}  // namespace

ReflectedHeatKernel::ReflectedHeatKernel(double a, double b, double theta, std::size_t series_terms)
    : a_(a), b_(b), theta_(theta), terms_(series_terms) {
    if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "kernel interval needs a < b");
    if (!(theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel theta must be positive");
    if (series_terms < 1) throw Error(ErrorCode::InvalidArgument, "kernel needs at least one series term");
}

ReflectedHeatKernel::ReflectedHeatKernel(const BoxDomain& interval, double theta, std::size_t series_terms)
    : ReflectedHeatKernel(interval.lower(0), interval.upper(0), theta, series_terms) {
    if (interval.dim() != 1) throw Error(ErrorCode::InvalidArgument, "kernel interval must be 1D");
}

void ReflectedHeatKernel::check_point(double x) const {
    if (!(x >= a_ && x <= b_)) {
        throw Error(ErrorCode::OutOfDomain, "point " + std::to_string(x) + " outside [" +
                                                std::to_string(a_) + ", " + std::to_string(b_) + "]");
    }
}

void ReflectedHeatKernel::check_time(double t) const {
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel time must be positive");
}

double ReflectedHeatKernel::mode_decay(std::size_t m, double t) const {
    const double r = length();
    const double md = static_cast<double>(m);
    return std::exp(-theta_ * kPi * kPi * md * md * t / (r * r));
}

double ReflectedHeatKernel::mode_cos(std::size_t m, double x) const {
    return std::cos(static_cast<double>(m) * kPi * (x - a_) / length());
}

double ReflectedHeatKernel::eval_cosine(double x, double y, double t) const {
    return eval_cosine(x, y, t, terms_);
}

double ReflectedHeatKernel::eval_cosine(double x, double y, double t, std::size_t terms) const {
    check_point(x);
    check_point(y);
    check_time(t);
    const double r = length();
    double s = 0.0;
    for (std::size_t m = 1; m <= terms; ++m) {
        const double e = mode_decay(m, t);
        if (e == 0.0) break;
        s += e * mode_cos(m, x) * mode_cos(m, y);
    }
    return 1.0 / r + 2.0 / r * s;
}

double ReflectedHeatKernel::eval_images(double x, double y, double t, std::size_t n_images) const {
    check_point(x);
    check_point(y);
    check_time(t);
    const double r = length();
    const double xt = x - a_;
    const double yt = y - a_;
    const double var4 = 4.0 * theta_ * t;
    const auto n = static_cast<long>(n_images);
    double s = 0.0;
    for (long m = -n; m <= n; ++m) {
        const double c = 2.0 * static_cast<double>(m) * r;
        const double d1 = c - xt - yt;
        const double d2 = c - xt + yt;
        s += std::exp(-d1 * d1 / var4) + std::exp(-d2 * d2 / var4);
    }
    return s / std::sqrt(kPi * var4);
}

double ReflectedHeatKernel::tail_bound(double t, std::size_t terms) const {
    check_time(t);
    const double r = length();
    const double q = theta_ * kPi * kPi * t / (r * r);
    const double mp1 = static_cast<double>(terms) + 1.0;
    // Successive term ratios beyond M+1 are at most exp(-q (2M + 3)).
    const double ratio = std::exp(-q * (2.0 * static_cast<double>(terms) + 3.0));
    return 2.0 / r * std::exp(-q * mp1 * mp1) / (1.0 - ratio);
}

std::size_t ReflectedHeatKernel::required_terms(double t, double tol) const {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    check_time(t);
    // Bisection on the monotone bound; the answer is capped at kMaxSeriesTerms.
    if (tail_bound(t, kMaxSeriesTerms) >= tol) {
        throw Error(ErrorCode::Diverged, "cosine series needs more than " +
                                             std::to_string(kMaxSeriesTerms) + " terms at t = " +
                                             std::to_string(t) + "; use the image sum");
    }
    std::size_t lo = 1;
    std::size_t hi = kMaxSeriesTerms;
    if (tail_bound(t, lo) < tol) return lo;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (tail_bound(t, mid) < tol) hi = mid; else lo = mid;
    }
    return hi;
}

std::size_t ReflectedHeatKernel::required_images(double t, double tol) const {
    check_time(t);
    // Images beyond |m| = n sit at distance >= 2 n r - 2 r from the window.
    const double var4 = 4.0 * theta_ * t;
    const double reach = std::sqrt(var4 * std::max(1.0, -std::log(tol * std::sqrt(kPi * var4))));
    return static_cast<std::size_t>(std::ceil(reach / (2.0 * length()))) + 1;
}

bool ReflectedHeatKernel::cosine_sufficient(double t) const {
    return tail_bound(t, terms_) < kAutoTol;
}

double ReflectedHeatKernel::eval(double x, double y, double t) const {
    if (cosine_sufficient(t)) return eval_cosine(x, y, t);
    return eval_images(x, y, t, required_images(t, kAutoTol));
}

Eigen::MatrixXd kernel_matrix(const ReflectedHeatKernel& k, const Grid& g, double t) {
    if (g.dim() != 1 || g.domain().lower(0) != k.lower() || g.domain().upper(0) != k.upper()) {
        throw Error(ErrorCode::DomainMismatch, "kernel matrix grid must cover the kernel interval");
    }
    const std::size_t n = g.size();
    const auto x = g.axis_coordinates(0);
    const auto w = g.axis_weights(0);
    Eigen::MatrixXd a(n, n);
    if (k.cosine_sufficient(t)) {
        const std::size_t m_terms = k.series_terms();
        Eigen::MatrixXd c(n, m_terms);
        Eigen::VectorXd decay(m_terms);
        for (std::size_t m = 1; m <= m_terms; ++m) {
            decay(m - 1) = k.mode_decay(m, t);
            for (std::size_t i = 0; i < n; ++i) c(i, m - 1) = k.mode_cos(m, x[i]);
        }
        const double r = k.length();
        a = (2.0 / r) * (c * decay.asDiagonal() * c.transpose());
        a.array() += 1.0 / r;
    } else {
        const std::size_t images = k.required_images(t, 1e-14);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                a(i, j) = a(j, i) = k.eval_images(x[i], x[j], t, images);
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j) a.col(j) *= w[j];
    return a;
}

}  // namespace rbridge
