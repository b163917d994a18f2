#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rbridge/bridge.hpp"
#include "rbridge/config.hpp"
#include "rbridge/density.hpp"
#include "rbridge/domain.hpp"
#include "rbridge/drift.hpp"

namespace rbridge {

struct SkorokhodStep {
    double x;
    double dL;
    double dU;
};

/// Per-step projection of x_prev + increment onto [a, b]. dL and dU are the
/// local-time increments pushed by the lower and upper walls.
[[nodiscard]] SkorokhodStep skorokhod_step(double x_prev, double increment, double a, double b) noexcept;
[[nodiscard]] SkorokhodStep skorokhod_step_1d(double x_prev, double increment, const BoxDomain& interval);

struct ReflectedPath {
    std::vector<double> x;  // x[0] = x0, one entry per increment after that
    std::vector<double> lower_local_time;
    std::vector<double> upper_local_time;
};

/// Applies skorokhod_step along a whole increment sequence.
[[nodiscard]] ReflectedPath reflect_path(double x0, std::span<const double> increments, const BoxDomain& interval);

/// Space-time control u(t, x) built from nodal snapshots: linear in time,
/// bilinear in space. Inside the cell touching a face, an outward-pointing
/// normal component is clamped to zero so interpolation cannot push into a wall.
class ControlField {
public:
    ControlField(Grid grid, std::vector<double> times, std::vector<VectorField> snapshots);
    [[nodiscard]] static ControlField from_solution(const BridgeSolution& sol);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }

    /// Throws ControlOutOfRange outside [t_first, t_last] x box.
    [[nodiscard]] std::array<double, 2> operator()(double t, std::span<const double> x) const;

private:
    Grid grid_;
    std::vector<double> times_;
    std::vector<VectorField> snapshots_;
};

/// Reflected Euler-Maruyama ensemble. States and cumulative local times are
/// kept every `record_every` steps plus the final step; containment and
/// local-time complementarity are checked at every step.
class PathEnsemble {
public:
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t n_paths() const noexcept { return n_paths_; }
    [[nodiscard]] std::size_t steps() const noexcept { return steps_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] const BoxDomain& domain() const noexcept { return domain_; }

    /// Step index of each record; the first is 0 and the last is steps().
    [[nodiscard]] const std::vector<std::size_t>& record_steps() const noexcept { return record_steps_; }
    [[nodiscard]] std::size_t n_records() const noexcept { return record_steps_.size(); }
    [[nodiscard]] double record_time(std::size_t r) const noexcept { return static_cast<double>(record_steps_[r]) * dt_; }
    /// Record nearest to time t.
    [[nodiscard]] std::size_t nearest_record(double t) const;

    [[nodiscard]] double state(std::size_t path, std::size_t record, std::size_t axis) const {
        return states_[index(path, record, axis)];
    }
    [[nodiscard]] double local_time_lower(std::size_t path, std::size_t record, std::size_t axis) const {
        return lower_[index(path, record, axis)];
    }
    [[nodiscard]] double local_time_upper(std::size_t path, std::size_t record, std::size_t axis) const {
        return upper_[index(path, record, axis)];
    }
    /// Positions of all paths at a record, one array per path.
    [[nodiscard]] std::vector<std::array<double, 2>> positions(std::size_t record) const;

    /// Steps where a state left the closed box (must be 0).
    [[nodiscard]] std::size_t containment_violations() const noexcept { return containment_violations_; }
    /// Steps where dL or dU was positive without the state sitting on that face, or the reverse.
    [[nodiscard]] std::size_t complementarity_violations() const noexcept { return complementarity_violations_; }
    /// Path-steps where some wall pushed.
    [[nodiscard]] std::size_t reflection_events() const noexcept { return reflection_events_; }

private:
    friend PathEnsemble simulate(const std::vector<std::array<double, 2>>&, const BoxDomain&, const DriftSpec&,
                                 const ControlField*, const SolverConfig&, std::uint64_t, std::size_t);

    PathEnsemble(BoxDomain domain) : domain_(std::move(domain)) {}

    [[nodiscard]] std::size_t index(std::size_t p, std::size_t r, std::size_t a) const noexcept {
        return (p * record_steps_.size() + r) * dim_ + a;
    }

    BoxDomain domain_;
    std::size_t dim_ = 1;
    std::size_t n_paths_ = 0;
    std::size_t steps_ = 0;
    double dt_ = 0.0;
    std::uint64_t seed_ = 0;
    std::vector<std::size_t> record_steps_;
    std::vector<double> states_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::size_t containment_violations_ = 0;
    std::size_t complementarity_violations_ = 0;
    std::size_t reflection_events_ = 0;
};

/// Per-path substream seed derived from (seed, path) by splitmix64 mixing.
[[nodiscard]] std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) noexcept;

/// dx = (f + u) dt + sqrt(2 theta) dw, reflected coordinatewise, with
/// dt = 1 / config.time_steps. `control` may be null (open loop).
[[nodiscard]] PathEnsemble simulate(const std::vector<std::array<double, 2>>& initial, const BoxDomain& domain,
                                    const DriftSpec& drift, const ControlField* control, const SolverConfig& config,
                                    std::uint64_t seed, std::size_t record_every = 1);

/// Draws initial states from rho0 with inverse_cdf_sample(rho0, n, seed) first.
[[nodiscard]] PathEnsemble simulate(const GridDensity& rho0, std::size_t n, const DriftSpec& drift,
                                    const ControlField* control, const SolverConfig& config, std::uint64_t seed,
                                    std::size_t record_every = 1);

/// Histogram of the record nearest t: each state counts toward its nearest
/// node, divided by the node's trapezoid weight, so the result has unit mass.
[[nodiscard]] GridDensity empirical_marginal(const PathEnsemble& e, double t, const Grid& grid);

/// I.i.d. samples from the piecewise-linear (1D) or piecewise-bilinear (2D)
/// interpolant of d. 2D draws x1 from its marginal, then x2 from the
/// conditional at that x1.
[[nodiscard]] std::vector<std::array<double, 2>> inverse_cdf_sample(const GridDensity& d, std::size_t n,
                                                                    std::uint64_t seed);

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
[[nodiscard]] double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Average of fine's interpolant over each dual cell of `coarse`, normalized.
/// The right comparison target for empirical_marginal on a coarse grid.
[[nodiscard]] GridDensity cell_average(const GridDensity& fine, const Grid& coarse);

/// Bilinear (1D: linear) interpolation of nodal data at x.
[[nodiscard]] double interpolate(const GridDensity& d, std::span<const double> x);

/// Ensemble CSV with columns path_id, step, t, x1[, x2] and per-record
/// local-time increments (dL, dU in 1D; dL1, dU1, dL2, dU2 in 2D).
[[nodiscard]] std::string ensemble_csv(const PathEnsemble& e);

/// Writes the CSV and a JSON sidecar (`<csv>.json`) carrying config and seed.
void export_ensemble(const PathEnsemble& e, const SolverConfig& config, const std::filesystem::path& csv_path);

}  // namespace rbridge
