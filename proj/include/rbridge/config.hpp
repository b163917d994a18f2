#pragma once

#include <cstddef>

namespace rbridge {

/// Numerical knobs shared by the bridge solvers. Horizon is fixed to [0, 1].
struct SolverConfig {
    double theta = 0.5;
    static constexpr double horizon = 1.0;
    std::size_t time_steps = 1000;
    std::size_t series_terms = 100;
    double fp_tol = 1e-9;
    std::size_t fp_max_iter = 500;
    /// Divisor floor relative to the divisor's peak value.
    double density_floor = 1e-12;
    std::size_t snapshots = 11;

    /// Throws InvalidArgument on violated invariants.
    void validate() const;
    [[nodiscard]] double dt() const noexcept { return horizon / static_cast<double>(time_steps); }
};

}  // namespace rbridge
