#include "rbridge/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "rbridge/bridge.hpp"
#include "rbridge/cli/artifacts.hpp"
#include "rbridge/cli/scenario.hpp"
#include "rbridge/fpk.hpp"
#include "rbridge/io.hpp"
#include "rbridge/kernel.hpp"
#include "rbridge/sde.hpp"

namespace rbridge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kMassTol = 1e-6;
constexpr double kProductTol = 1e-12;
constexpr double kOracleTol = 1e-10;

class Checks {
public:
    void add(const std::string& name, double value, double limit, bool passed) {
        doc_[name] = {{"value", value}, {"limit", limit}, {"passed", passed}};
        ok_ = ok_ && passed;
    }
    void at_most(const std::string& name, double value, double limit) { add(name, value, limit, value <= limit); }
    [[nodiscard]] bool ok() const noexcept { return ok_; }
    [[nodiscard]] const json& doc() const noexcept { return doc_; }

private:
    json doc_ = json::object();
    bool ok_ = true;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs a command body, mapping library errors to exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

Scenario load(const std::string& name) { return load_scenario(resolve_scenario_path(name)); }

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return true;
}

double boundary_normal_control(const Grid& g, const std::function<double(std::size_t, std::size_t)>& u) {
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto ij = g.unflatten(k);
        for (std::size_t a = 0; a < g.dim(); ++a) {
            if (ij[a] == 0 || ij[a] + 1 == g.points(a)) worst = std::max(worst, std::abs(u(k, a)));
        }
    }
    return worst;
}

std::vector<double> time_grid(const BridgeEngine& engine, std::size_t count) {
    std::vector<double> t(count);
    for (std::size_t k = 0; k < count; ++k) t[k] = engine.representable(static_cast<double>(k) / static_cast<double>(count - 1));
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::OutOfDomain:
        case ErrorCode::DomainMismatch:
        case ErrorCode::ZeroMass: return kExitConfig;
        case ErrorCode::MaxIterations:
        case ErrorCode::ProxNoConverge: return kExitNoConvergence;
        case ErrorCode::MissingSolution: return kExitMissing;
        case ErrorCode::FloorDominant: return kExitFloorDominant;
        default: return kExitEngine;
    }
}

int run_solve(const SolveOptions& opt, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        Scenario s = load(opt.scenario);
        if (opt.snapshots) {
            s.document["solver"]["snapshots"] = *opt.snapshots;
            s = parse_scenario(s.document);
        }
        fs::create_directories(opt.out);
        const Grid grid = s.grid();
        const auto engine = s.make_engine();
        const GridDensity rho0 = s.rho0_density();
        const GridDensity rho1 = s.rho1_density();
        log << "solving " << s.name << " on " << grid.size() << " nodes\n";

        const auto t0 = std::chrono::steady_clock::now();
        const BridgeSolution sol = solve(rho0, rho1, s.config, *engine);
        const double wall = seconds_since(t0);
        log << "converged in " << sol.iterations << " iterations (" << wall << " s)\n";

        Checks checks;
        double mass_dev = 0.0;
        double product_dev = 0.0;
        double normal_u = 0.0;
        json snaps = json::array();
        for (std::size_t k = 0; k < sol.times.size(); ++k) {
            const double m = sol.rho[k].mass();
            mass_dev = std::max(mass_dev, std::abs(m - 1.0));
            const double peak = sol.rho[k].max_value();
            for (std::size_t i = 0; i < grid.size(); ++i) {
                product_dev = std::max(product_dev, std::abs(sol.rho[k][i] - sol.phi[k][i] * sol.phihat[k][i]) / peak);
            }
            normal_u = std::max(normal_u, boundary_normal_control(grid, [&](std::size_t i, std::size_t a) {
                                    return sol.control[k][i][a];
                                }));
            const std::string file = snapshot_file_name(k);
            if (s.wants("snapshots")) write_file_atomic(opt.out / file, snapshot_csv(sol, k));
            snaps.push_back({{"file", s.wants("snapshots") ? json(file) : json(nullptr)}, {"t", sol.times[k]}, {"mass", m}});
        }
        const bool kernel = s.engine == EngineKind::Kernel;
        std::vector<double> trace;
        for (const auto& r : sol.residual_trace) trace.push_back(r.phi1);
        checks.at_most("snapshot_mass_deviation", mass_dev, kMassTol);
        checks.at_most("rho_equals_phi_phihat", product_dev, kProductTol);
        checks.at_most("endpoint_l1_rho0", sol.endpoint_error0, kernel ? 1e-6 : 1e-3);
        checks.at_most("endpoint_l1_rho1", sol.endpoint_error1, kernel ? 1e-4 : 1e-3);
        checks.at_most("boundary_normal_control", normal_u, 0.0);
        checks.add("residual_strictly_decreasing", static_cast<double>(strictly_decreasing(trace)), 1.0,
                   strictly_decreasing(trace));

        if (s.wants("residuals")) write_file_atomic(opt.out / "residuals.csv", residuals_csv(sol));
        if (s.wants("factors")) write_file_atomic(opt.out / "factors.csv", factors_csv(sol.factors));

        const auto& last = sol.residual_trace.back();
        json manifest{{"format_version", kFormatVersion},
                      {"command", "solve"},
                      {"scenario_name", s.name},
                      {"scenario", s.document},
                      {"config_hash", s.problem_hash()},
                      {"engine", kernel ? "kernel" : "fpk"},
                      {"iterations", sol.iterations},
                      {"final_residuals", {{"phi1", last.phi1}, {"phihat0", last.phihat0}}},
                      {"endpoint_l1", {{"rho0", sol.endpoint_error0}, {"rho1", sol.endpoint_error1}}},
                      {"wall_time_s", wall},
                      {"snapshots", snaps},
                      {"factors", s.wants("factors") ? json("factors.csv") : json(nullptr)},
                      {"residuals", s.wants("residuals") ? json("residuals.csv") : json(nullptr)},
                      {"checks", checks.doc()},
                      {"status", checks.ok() ? "ok" : "invariant_failure"}};
        write_json(opt.out / "manifest.json", manifest);
        if (!checks.ok()) {
            err << "invariant check failed; see " << (opt.out / "manifest.json").string() << "\n";
            return static_cast<int>(kExitInvariant);
        }
        return static_cast<int>(kExitOk);
    });
}

int run_simulate(const SimulateOptions& opt, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        Scenario s = load(opt.scenario);
        if (opt.seed) s.document["simulation"]["seed"] = *opt.seed;
        if (opt.paths) s.document["simulation"]["paths"] = *opt.paths;
        if (opt.snapshots) s.document["simulation"]["control_snapshots"] = *opt.snapshots;
        if (opt.seed || opt.paths || opt.snapshots) s = parse_scenario(s.document);
        fs::create_directories(opt.out);
        const Grid grid = s.grid();
        const auto engine = s.make_engine();
        const GridDensity rho0 = s.rho0_density();
        const GridDensity rho1 = s.rho1_density();
        const DriftSpec drift = s.drift();
        const auto& sim = s.simulation;
        const auto t0 = std::chrono::steady_clock::now();

        std::optional<ControlField> control;
        if (opt.closed_loop) {
            const fs::path manifest_path = opt.out / "manifest.json";
            if (!fs::exists(manifest_path)) {
                throw Error(ErrorCode::MissingSolution, "closed loop needs a solve manifest in " + opt.out.string());
            }
            const json manifest = read_json(manifest_path);
            if (manifest.value("config_hash", std::string()) != s.problem_hash()) {
                throw Error(ErrorCode::MissingSolution, "solve manifest belongs to a different problem; rerun solve");
            }
            if (!manifest.contains("factors") || !manifest["factors"].is_string()) {
                throw Error(ErrorCode::MissingSolution, "solve run did not write factors.csv");
            }
            const CsvTable f = read_csv(opt.out / manifest["factors"].get<std::string>());
            if (f.rows.size() != grid.size()) throw Error(ErrorCode::MissingSolution, "factors.csv does not match the grid");
            const std::size_t c = f.column("phi1");
            std::vector<double> phi1(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) phi1[i] = f.rows[i][c];
            const auto times = time_grid(*engine, sim.control_snapshots);
            const auto phis = engine->backward_snapshots(phi1, times);
            std::vector<VectorField> u;
            for (const auto& p : phis) u.push_back(compute_control(GridDensity(grid, p), s.config.theta));
            control.emplace(grid, times, std::move(u));
            log << "control rebuilt at " << times.size() << " times\n";
        }

        const PathEnsemble e = simulate(rho0, sim.paths, drift, control ? &*control : nullptr, s.config, sim.seed,
                                        sim.record_every);
        const std::string tag = opt.closed_loop ? "closed_loop" : "open_loop";
        export_ensemble(e, s.config, opt.out / ("paths_" + tag + ".csv"));
        log << "simulated " << e.n_paths() << " paths, " << e.reflection_events() << " reflecting steps\n";

        Checks checks;
        checks.at_most("containment_violations", static_cast<double>(e.containment_violations()), 0.0);
        checks.at_most("local_time_complementarity_violations", static_cast<double>(e.complementarity_violations()), 0.0);

        json stats = json::object();
        if (e.n_paths() > 0) {
            const Grid hist(grid.domain(), std::vector<std::size_t>(grid.dim(), sim.histogram_points));
            const GridDensity empirical = empirical_marginal(e, 1.0, hist);
            const GridDensity target = cell_average(rho1, hist);
            const GridDensity unc_fine = normalize(GridDensity(grid, engine->forward(rho0.values())));
            const GridDensity uncontrolled = cell_average(unc_fine, hist);
            auto header = coordinate_names(hist);
            auto cols = coordinate_columns(hist);
            header.insert(header.end(), {"empirical", "target_rho1", "uncontrolled"});
            cols.push_back(empirical.values());
            cols.push_back(target.values());
            cols.push_back(uncontrolled.values());
            write_file_atomic(opt.out / ("terminal_marginal_" + tag + ".csv"), csv_text(header, cols));
            stats["l1_empirical_vs_rho1"] = l1_distance(empirical, target);
            stats["l1_empirical_vs_uncontrolled"] = l1_distance(empirical, uncontrolled);
            stats["l1_uncontrolled_vs_rho1"] = l1_distance(uncontrolled, target);
            if (grid.dim() == 1) {
                std::vector<double> terminal;
                const std::size_t r = e.n_records() - 1;
                for (std::size_t p = 0; p < e.n_paths(); ++p) terminal.push_back(e.state(p, r, 0));
                const QuantileFunction f1(rho1);
                const QuantileFunction fu(unc_fine);
                stats["ks_vs_rho1"] = ks_statistic(terminal, [&](double x) { return f1.cdf(x); });
                stats["ks_vs_uncontrolled"] = ks_statistic(terminal, [&](double x) { return fu.cdf(x); });
            }
        }

        json manifest{{"format_version", kFormatVersion},
                      {"command", "simulate"},
                      {"scenario_name", s.name},
                      {"scenario", s.document},
                      {"config_hash", s.problem_hash()},
                      {"closed_loop", opt.closed_loop},
                      {"seed", sim.seed},
                      {"n_paths", e.n_paths()},
                      {"dt", e.dt()},
                      {"record_every", sim.record_every},
                      {"paths_file", "paths_" + tag + ".csv"},
                      {"reflection_events", e.reflection_events()},
                      {"statistics", stats},
                      {"wall_time_s", seconds_since(t0)},
                      {"checks", checks.doc()},
                      {"status", checks.ok() ? "ok" : "invariant_failure"}};
        write_json(opt.out / ("simulate_" + tag + ".json"), manifest);
        return static_cast<int>(checks.ok() ? kExitOk : kExitInvariant);
    });
}

int run_kernel_check(const KernelCheckOptions& opt, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        if (opt.lattice < 3) throw Error(ErrorCode::ConfigError, "lattice needs at least 3 nodes");
        const ReflectedHeatKernel k(opt.a, opt.b, opt.theta, opt.terms);
        const std::size_t n = opt.lattice;
        std::vector<double> x(n);
        std::vector<double> w(n);
        const double h = (opt.b - opt.a) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = i + 1 == n ? opt.b : opt.a + h * static_cast<double>(i);
            w[i] = (i == 0 || i + 1 == n) ? 0.5 * h : h;
        }
        const double tail = k.tail_bound(opt.t, opt.terms);
        const bool cosine_ok = tail < kOracleTol;

        double discrepancy = 0.0;
        double min_cos = INFINITY;
        double min_img = INFINITY;
        double max_img = -INFINITY;
        std::vector<double> full(n * n);
        std::vector<double> half(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double c = k.eval_cosine(x[i], x[j], opt.t);
                const double g = k.eval_images(x[i], x[j], opt.t, opt.images);
                discrepancy = std::max(discrepancy, std::abs(c - g));
                min_cos = std::min(min_cos, c);
                min_img = std::min(min_img, g);
                max_img = std::max(max_img, g);
                full[i * n + j] = g;
                half[i * n + j] = k.eval_images(x[i], x[j], 0.5 * opt.t, opt.images);
            }
        }
        double row_dev = 0.0;
        double ck_dev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += full[i * n + j] * w[j];
            row_dev = std::max(row_dev, std::abs(row - 1.0));
            for (std::size_t l = 0; l < n; ++l) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += half[i * n + j] * half[j * n + l] * w[j];
                ck_dev = std::max(ck_dev, std::abs(s - full[i * n + l]));
            }
        }

        Checks checks;
        checks.add("positivity_images", min_img, 0.0, min_img > 0.0);
        if (cosine_ok) checks.at_most("oracle_discrepancy", discrepancy, kOracleTol);
        json report{{"format_version", kFormatVersion},
                    {"command", "kernel-check"},
                    {"interval", {opt.a, opt.b}},
                    {"theta", opt.theta},
                    {"t", opt.t},
                    {"series_terms", opt.terms},
                    {"images", opt.images},
                    {"lattice", n},
                    {"cosine_tail_bound", tail},
                    {"cosine_truncation_sufficient", cosine_ok},
                    {"max_abs_cosine_minus_images", discrepancy},
                    {"min_kernel_cosine", min_cos},
                    {"min_kernel_images", min_img},
                    {"max_kernel_images", max_img},
                    {"row_sum_deviation", row_dev},
                    {"chapman_kolmogorov_deviation", ck_dev},
                    {"checks", checks.doc()},
                    {"status", checks.ok() ? "ok" : "invariant_failure"}};
        if (!cosine_ok) {
            report["note"] = "cosine truncation at " + std::to_string(opt.terms) +
                             " terms is insufficient at this t; the image sum is authoritative";
        }
        log << report.dump(2) << "\n";
        if (opt.out) {
            fs::create_directories(*opt.out);
            write_json(*opt.out / "kernel_check.json", report);
        }
        return static_cast<int>(checks.ok() ? kExitOk : kExitInvariant);
    });
}

int run_validate(const fs::path& out, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const fs::path manifest_path = out / "manifest.json";
        if (!fs::exists(manifest_path)) throw Error(ErrorCode::MissingSolution, "no manifest.json in " + out.string());
        const json manifest = read_json(manifest_path);
        const Scenario s = parse_scenario(manifest.at("scenario"));
        const Grid grid = s.grid();

        Checks checks;
        double mass_dev = 0.0;
        double product_dev = 0.0;
        double coord_dev = 0.0;
        double normal_u = 0.0;
        std::size_t files = 0;
        for (const auto& snap : manifest.at("snapshots")) {
            if (!snap.at("file").is_string()) continue;
            const CsvTable t = read_csv(out / snap["file"].get<std::string>());
            if (t.rows.size() != grid.size()) throw Error(ErrorCode::ConfigError, "snapshot row count does not match grid");
            ++files;
            const std::size_t cr = t.column("rho");
            const std::size_t cp = t.column("phi");
            const std::size_t ch = t.column("phihat");
            std::vector<double> rho(grid.size());
            double peak = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                rho[i] = t.rows[i][cr];
                peak = std::max(peak, rho[i]);
                const auto x = grid.node(i);
                for (std::size_t a = 0; a < grid.dim(); ++a) coord_dev = std::max(coord_dev, std::abs(t.rows[i][a] - x[a]));
            }
            for (std::size_t i = 0; i < grid.size(); ++i) {
                product_dev = std::max(product_dev, std::abs(rho[i] - t.rows[i][cp] * t.rows[i][ch]) / peak);
            }
            mass_dev = std::max(mass_dev, std::abs(GridDensity(grid, rho).mass() - 1.0));
            std::vector<std::size_t> cu;
            for (std::size_t a = 0; a < grid.dim(); ++a) cu.push_back(t.column("u" + std::to_string(a + 1)));
            normal_u = std::max(normal_u, boundary_normal_control(grid, [&](std::size_t i, std::size_t a) {
                                    return t.rows[i][cu[a]];
                                }));
        }
        checks.add("snapshot_files", static_cast<double>(files), 1.0, files > 0);
        checks.at_most("node_coordinates", coord_dev, 1e-12);
        checks.at_most("snapshot_mass_deviation", mass_dev, kMassTol);
        checks.at_most("rho_equals_phi_phihat", product_dev, kProductTol);
        checks.at_most("boundary_normal_control", normal_u, 0.0);
        if (manifest.contains("residuals") && manifest["residuals"].is_string()) {
            const CsvTable r = read_csv(out / manifest["residuals"].get<std::string>());
            const std::size_t c = r.column("d_hilbert_phi1");
            std::vector<double> trace;
            for (const auto& row : r.rows) trace.push_back(row[c]);
            const bool dec = strictly_decreasing(trace);
            checks.add("residual_strictly_decreasing", static_cast<double>(dec), 1.0, dec);
        }
        for (const char* tag : {"open_loop", "closed_loop"}) {
            const fs::path p = out / (std::string("paths_") + tag + ".csv");
            if (!fs::exists(p)) continue;
            const CsvTable t = read_csv(p);
            std::size_t outside = 0;
            for (const auto& row : t.rows) {
                for (std::size_t a = 0; a < grid.dim(); ++a) {
                    const double v = row[t.column("x" + std::to_string(a + 1))];
                    outside += v < grid.domain().lower(a) || v > grid.domain().upper(a);
                }
            }
            checks.at_most(std::string("containment_") + tag, static_cast<double>(outside), 0.0);
        }
        json report{{"command", "validate"}, {"directory", out.string()}, {"checks", checks.doc()},
                    {"status", checks.ok() ? "ok" : "invariant_failure"}};
        log << report.dump(2) << "\n";
        return static_cast<int>(checks.ok() ? kExitOk : kExitInvariant);
    });
}

}  // namespace rbridge::cli
