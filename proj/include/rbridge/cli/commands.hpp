#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "rbridge/errors.hpp"

namespace rbridge::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNoConvergence = 3,
    kExitInvariant = 4,
    kExitMissing = 5,
    kExitFloorDominant = 6,
    kExitEngine = 7,
};

[[nodiscard]] int exit_code_for(ErrorCode code) noexcept;

struct SolveOptions {
    std::string scenario;
    std::filesystem::path out;
    std::optional<std::size_t> snapshots;
};

struct SimulateOptions {
    std::string scenario;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    bool closed_loop = false;
    /// Overrides the number of control snapshots used in closed loop.
    std::optional<std::size_t> snapshots;
};

struct KernelCheckOptions {
    double a = -1.0;
    double b = 1.0;
    double theta = 0.5;
    double t = 1.0;
    std::size_t terms = 100;
    std::size_t images = 50;
    std::size_t lattice = 101;
    std::optional<std::filesystem::path> out;
};

// Each command reports progress on `log`, errors on `err`, and returns the exit code.
int run_solve(const SolveOptions& opt, std::ostream& log, std::ostream& err);
int run_simulate(const SimulateOptions& opt, std::ostream& log, std::ostream& err);
int run_kernel_check(const KernelCheckOptions& opt, std::ostream& log, std::ostream& err);
int run_validate(const std::filesystem::path& out, std::ostream& log, std::ostream& err);

}  // namespace rbridge::cli
