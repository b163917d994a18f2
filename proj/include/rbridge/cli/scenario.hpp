#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbridge/bridge.hpp"
#include "rbridge/cli/expression.hpp"
#include "rbridge/config.hpp"
#include "rbridge/density.hpp"
#include "rbridge/domain.hpp"
#include "rbridge/drift.hpp"

namespace rbridge::cli {

inline constexpr int kSchemaVersion = 1;

enum class EngineKind { Kernel, Fpk };

struct SimulationSettings {
    std::size_t paths = 100;
    std::uint64_t seed = 1;
    std::size_t record_every = 1;
    /// Time snapshots of the control used by closed-loop runs.
    std::size_t control_snapshots = 1001;
    /// Nodes per axis of the histogram grid for marginal comparisons.
    std::size_t histogram_points = 17;
};

/// A fully validated scenario document.
struct Scenario {
    std::string name;
    BoxDomain domain;
    std::vector<std::size_t> points;
    std::optional<Expression> potential;
    Expression rho0;
    Expression rho1;
    EngineKind engine;
    SolverConfig config;
    SimulationSettings simulation;
    std::vector<std::string> outputs;
    /// The effective document, overrides applied.
    nlohmann::json document;

    [[nodiscard]] Grid grid() const { return Grid(domain, points); }
    [[nodiscard]] DriftSpec drift() const;
    [[nodiscard]] GridDensity rho0_density() const;
    [[nodiscard]] GridDensity rho1_density() const;
    [[nodiscard]] std::unique_ptr<BridgeEngine> make_engine() const;
    /// FNV-1a hash of every field that affects the solution factors.
    [[nodiscard]] std::string problem_hash() const;
    [[nodiscard]] bool wants(const std::string& output) const;
};

/// Throws ConfigError with a message naming the offending field or token.
[[nodiscard]] Scenario parse_scenario(const nlohmann::json& doc);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// Resolves a bare name such as "paper-1d" against the bundled scenarios.
[[nodiscard]] std::filesystem::path resolve_scenario_path(const std::string& name_or_path);

}  // namespace rbridge::cli
