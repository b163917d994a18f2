#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library, so agreement is a genuine cross-check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return s * h / 3.0;
}

/// Heat kernel on the real line for dx = sqrt(2 theta) dw.
inline double free_gaussian(double x, double y, double theta, double t) {
    return std::exp(-(x - y) * (x - y) / (4.0 * theta * t)) / std::sqrt(4.0 * kPi * theta * t);
}

/// Reflected kernel on [a, b] by folding the free Gaussian over mirror images.
inline double mirror_sum(double x, double y, double a, double b, double theta, double t, int images) {
    const double r = b - a;
    double s = 0.0;
    for (int m = -images; m <= images; ++m) {
        const double shift = 2.0 * r * m;
        s += free_gaussian(x - a, y - a + shift, theta, t) + free_gaussian(x - a, -(y - a) + shift, theta, t);
    }
    return s;
}

/// Brute-force (2/r) sum_{m > M} exp(-theta pi^2 m^2 t / r^2) over `count` terms.
inline double cosine_tail(double r, double theta, double t, std::size_t m_start, std::size_t count) {
    double s = 0.0;
    for (std::size_t m = m_start + 1; m <= m_start + count; ++m) {
        const double md = static_cast<double>(m);
        s += std::exp(-theta * kPi * kPi * md * md * t / (r * r));
    }
    return 2.0 / r * s;
}

inline double rho0_shape(double x) { return 1.0 + std::pow(x * x - 16.0, 2) * std::exp(-x / 2.0); }
inline double rho1_shape(double x) { return 1.2 - std::cos(kPi * (x + 4.0) / 2.0); }

/// Trapezoid weights on n uniform nodes over [a, b].
inline std::vector<double> trapezoid_weights(double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n - 1);
    std::vector<double> w(n, h);
    w.front() = w.back() = 0.5 * h;
    return w;
}

/// Dense Gaussian elimination with partial pivoting, for small systems.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[p * n + c])) p = r;
        }
        for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[p * n + k]);
        std::swap(b[c], b[p]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
        x[i] = s / a[i * n + i];
    }
    return x;
}

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace oracle
