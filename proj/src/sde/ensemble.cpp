#include <algorithm>
#include <cmath>
#include <random>

#include "rbridge/errors.hpp"
#include "rbridge/sde.hpp"

namespace rbridge {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(path + 0x632be59bd9b4e019ULL));
}

std::size_t PathEnsemble::nearest_record(double t) const {
    std::size_t best = 0;
    for (std::size_t r = 1; r < record_steps_.size(); ++r) {
        if (std::abs(record_time(r) - t) < std::abs(record_time(best) - t)) best = r;
    }
    return best;
}

std::vector<std::array<double, 2>> PathEnsemble::positions(std::size_t record) const {
    std::vector<std::array<double, 2>> out(n_paths_, {0.0, 0.0});
    for (std::size_t p = 0; p < n_paths_; ++p) {
        for (std::size_t a = 0; a < dim_; ++a) out[p][a] = state(p, record, a);
    }
    return out;
}

PathEnsemble simulate(const std::vector<std::array<double, 2>>& initial, const BoxDomain& domain,
                      const DriftSpec& drift, const ControlField* control, const SolverConfig& config,
                      std::uint64_t seed, std::size_t record_every) {
    if (!(config.theta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be nonnegative");
    if (config.time_steps == 0) throw Error(ErrorCode::InvalidArgument, "time_steps must be positive");
    if (record_every == 0) throw Error(ErrorCode::InvalidArgument, "record_every must be positive");
    if (control && !(control->grid().domain() == domain)) {
        throw Error(ErrorCode::DomainMismatch, "control lives on a different box");
    }

    PathEnsemble e(domain);
    e.dim_ = domain.dim();
    e.n_paths_ = initial.size();
    e.steps_ = config.time_steps;
    e.dt_ = config.dt();
    e.seed_ = seed;
    for (std::size_t s = 0; s < e.steps_; s += record_every) e.record_steps_.push_back(s);
    e.record_steps_.push_back(e.steps_);

    const std::size_t dim = e.dim_;
    const std::size_t total = e.n_paths_ * e.record_steps_.size() * dim;
    e.states_.resize(total);
    e.lower_.resize(total);
    e.upper_.resize(total);

    const double sigma = std::sqrt(2.0 * config.theta * e.dt_);
    std::array<double, 2> lo{domain.lower(0), dim > 1 ? domain.lower(1) : 0.0};
    std::array<double, 2> hi{domain.upper(0), dim > 1 ? domain.upper(1) : 0.0};

    for (std::size_t p = 0; p < e.n_paths_; ++p) {
        std::array<double, 2> x = initial[p];
        if (!domain.contains(std::span<const double>(x.data(), dim))) {
            throw Error(ErrorCode::OutOfDomain, "initial state outside the box");
        }
        std::mt19937_64 rng(path_seed(seed, p));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::array<double, 2> lower{0.0, 0.0};
        std::array<double, 2> upper{0.0, 0.0};
        std::size_t rec = 0;
        auto store = [&] {
            for (std::size_t a = 0; a < dim; ++a) {
                const std::size_t idx = e.index(p, rec, a);
                e.states_[idx] = x[a];
                e.lower_[idx] = lower[a];
                e.upper_[idx] = upper[a];
            }
            ++rec;
        };
        store();
        for (std::size_t s = 1; s <= e.steps_; ++s) {
            const double t = static_cast<double>(s - 1) * e.dt_;
            const std::span<const double> xs(x.data(), dim);
            const auto f = drift.drift(xs);
            const std::array<double, 2> u = control ? (*control)(t, xs) : std::array<double, 2>{0.0, 0.0};
            std::array<double, 2> xi{0.0, 0.0};
            for (std::size_t a = 0; a < dim; ++a) xi[a] = normal(rng);
            bool pushed = false;
            for (std::size_t a = 0; a < dim; ++a) {
                const auto step = skorokhod_step(x[a], (f[a] + u[a]) * e.dt_ + sigma * xi[a], lo[a], hi[a]);
                x[a] = step.x;
                lower[a] += step.dL;
                upper[a] += step.dU;
                pushed = pushed || step.dL > 0.0 || step.dU > 0.0;
                if (x[a] < lo[a] || x[a] > hi[a]) ++e.containment_violations_;
                if ((step.dL > 0.0 && x[a] != lo[a]) || (step.dU > 0.0 && x[a] != hi[a])) {
                    ++e.complementarity_violations_;
                }
            }
            e.reflection_events_ += pushed;
            if (rec < e.record_steps_.size() && e.record_steps_[rec] == s) store();
        }
    }
    return e;
}

PathEnsemble simulate(const GridDensity& rho0, std::size_t n, const DriftSpec& drift, const ControlField* control,
                      const SolverConfig& config, std::uint64_t seed, std::size_t record_every) {
    return simulate(inverse_cdf_sample(rho0, n, seed), rho0.grid().domain(), drift, control, config, seed,
                    record_every);
}

GridDensity empirical_marginal(const PathEnsemble& e, double t, const Grid& grid) {
    if (!(grid.domain() == e.domain())) throw Error(ErrorCode::DomainMismatch, "histogram grid covers another box");
    if (e.n_paths() == 0) throw Error(ErrorCode::ZeroMass, "empty ensemble has no marginal");
    const std::size_t r = e.nearest_record(t);
    std::vector<double> counts(grid.size(), 0.0);
    for (std::size_t p = 0; p < e.n_paths(); ++p) {
        std::array<std::size_t, 2> ij{0, 0};
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            const double s = (e.state(p, r, a) - grid.domain().lower(a)) / grid.spacing(a);
            ij[a] = std::min(static_cast<std::size_t>(std::llround(std::max(s, 0.0))), grid.points(a) - 1);
        }
        counts[grid.flatten(ij[0], ij[1])] += 1.0;
    }
    const double n = static_cast<double>(e.n_paths());
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] /= n * grid.weight(k);
    return normalize(GridDensity(grid, std::move(counts)));
}

}  // namespace rbridge
