#pragma once

#include <array>
#include <functional>
#include <span>

namespace rbridge {

using ScalarField = std::function<double(std::span<const double>)>;
using GradientField = std::function<std::array<double, 2>(std::span<const double>)>;

/// Prior drift f. Either zero or f = -grad V for a potential V.
struct DriftSpec {
    enum class Kind { Zero, GradientPotential };

    Kind kind = Kind::Zero;
    ScalarField potential;
    GradientField gradient;

    static DriftSpec zero() { return {}; }
    static DriftSpec from_potential(ScalarField v, GradientField grad_v);

    [[nodiscard]] bool is_zero() const noexcept { return kind == Kind::Zero; }
    [[nodiscard]] double value(std::span<const double> x) const;
    /// f(x) = -grad V(x); zero for Kind::Zero.
    [[nodiscard]] std::array<double, 2> drift(std::span<const double> x) const;
};

}  // namespace rbridge
