#include <iostream>

#include <CLI11.hpp>

#include "rbridge/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace rbridge::cli;

    CLI::App app{"Reflected Schrodinger bridge solver"};
    app.require_subcommand(1);

    SolveOptions solve;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the bridge for a scenario and write snapshots");
    solve_cmd->add_option("--scenario", solve.scenario, "Scenario file or bundled name")->required();
    solve_cmd->add_option("--out", solve.out, "Output directory")->required();
    solve_cmd->add_option("--snapshots", solve.snapshots, "Number of time snapshots")->check(CLI::Range(2, 100000));

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate reflected sample paths");
    sim_cmd->add_option("--scenario", sim.scenario, "Scenario file or bundled name")->required();
    sim_cmd->add_option("--out", sim.out, "Output directory (holds the solve manifest for closed loop)")->required();
    sim_cmd->add_option("--seed", sim.seed, "RNG seed");
    sim_cmd->add_option("--paths", sim.paths, "Number of paths");
    sim_cmd->add_flag("--closed-loop", sim.closed_loop, "Apply the solved optimal control");
    sim_cmd->add_option("--snapshots", sim.snapshots, "Control time snapshots")->check(CLI::Range(2, 100000));

    KernelCheckOptions kc;
    auto* kc_cmd = app.add_subcommand("kernel-check", "Cross-check the reflected heat kernel evaluations");
    kc_cmd->add_option("--a", kc.a, "Lower end of the interval");
    kc_cmd->add_option("--b", kc.b, "Upper end of the interval");
    kc_cmd->add_option("--theta", kc.theta, "Temperature");
    kc_cmd->add_option("--t", kc.t, "Time");
    kc_cmd->add_option("--terms", kc.terms, "Cosine series terms");
    kc_cmd->add_option("--images", kc.images, "Image pairs per side");
    kc_cmd->add_option("--lattice", kc.lattice, "Lattice nodes per axis");
    kc_cmd->add_option("--out", kc.out, "Directory for kernel_check.json");

    std::string validate_dir;
    auto* val_cmd = app.add_subcommand("validate", "Re-check invariants on existing artifacts");
    val_cmd->add_option("--out", validate_dir, "Artifact directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*solve_cmd) return run_solve(solve, std::cout, std::cerr);
    if (*sim_cmd) return run_simulate(sim, std::cout, std::cerr);
    if (*kc_cmd) return run_kernel_check(kc, std::cout, std::cerr);
    return run_validate(validate_dir, std::cout, std::cerr);
}
