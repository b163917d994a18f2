// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rbridge/bridge.hpp"
#include "rbridge/cli/artifacts.hpp"
#include "rbridge/cli/commands.hpp"
#include "rbridge/errors.hpp"
#include "rbridge/fpk.hpp"
#include "rbridge/kernel.hpp"
#include "rbridge/sde.hpp"

namespace fs = std::filesystem;
using namespace rbridge;

namespace {

constexpr double kTheta = 0.5;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // Records a named measurement and folds its verdict into the outcome.
    void expect(const std::string& name, double value, const char* rel, double bound) {
        const std::string r(rel);
        const bool ok = r == "<=" ? value <= bound : r == ">=" ? value >= bound : r == "<" ? value < bound : value > bound;
        pass = pass && ok;
        detail << name << "=" << value << (ok ? "" : "(!)") << " ";
    }
    void expect(const std::string& name, bool ok) {
        pass = pass && ok;
        detail << name << "=" << (ok ? "yes" : "no(!)") << " ";
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Grid wide_grid(std::size_t n = 801) { return Grid::uniform(BoxDomain::interval(-4.0, 4.0), n); }

GridDensity skewed_rho0(const Grid& g) {
    return normalize(GridDensity::sample(g, [](std::span<const double> x) { return oracle::rho0_shape(x[0]); }));
}

GridDensity periodic_rho1(const Grid& g) {
    return normalize(GridDensity::sample(g, [](std::span<const double> x) { return oracle::rho1_shape(x[0]); }));
}

// Closed-form CDF of the normalized terminal density on [-4, 4].
double rho1_cdf(double x) {
    const double s = std::clamp(x, -4.0, 4.0) + 4.0;
    return (1.2 * s - 2.0 / oracle::kPi * std::sin(oracle::kPi * s / 2.0)) / 9.6;
}

DriftSpec quadratic_1d() {
    return DriftSpec::from_potential([](std::span<const double> x) { return x[0] * x[0] / 5.0; },
                                     [](std::span<const double> x) { return std::array<double, 2>{2.0 * x[0] / 5.0, 0.0}; });
}

DriftSpec cubic_drift() {
    return DriftSpec::from_potential(
        [](std::span<const double> x) { return (x[0] * x[0] + x[1] * x[1] * x[1]) / 5.0; },
        [](std::span<const double> x) { return std::array<double, 2>{2.0 * x[0] / 5.0, 3.0 * x[1] * x[1] / 5.0}; });
}

// Trapezoid integral on uniform nodes, computed here rather than through the library.
double trapezoid(const std::vector<double>& v, double h) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i == 0 || i + 1 == v.size() ? 0.5 : 1.0) * v[i];
    return s * h;
}

double l1_nodes(const std::vector<double>& a, const std::vector<double>& b, double h) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = std::abs(a[i] - b[i]);
    return trapezoid(d, h);
}

double linf_nodes(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Outcome ac1_kernel_oracle() {
    Outcome o;
    double worst = 0.0;
    double worst_lib_images = 0.0;
    double min_value = INFINITY;
    double min_cosine = INFINITY;
    for (double r : {1.0, 4.0}) {
        const ReflectedHeatKernel k(-r, r, kTheta);
        for (double t : {0.1, 0.5, 1.0}) {
            const std::size_t m = k.required_terms(t, 1e-10);
            for (int i = 0; i <= 100; ++i) {
                const double x = -r + 2.0 * r * i / 100.0;
                for (int j = 0; j <= 100; ++j) {
                    const double y = -r + 2.0 * r * j / 100.0;
                    const double cosine = k.eval_cosine(x, y, t, m);
                    const double images = k.eval_images(x, y, t, 50);
                    const double ref = oracle::mirror_sum(x, y, -r, r, kTheta, t, 50);
                    worst = std::max(worst, std::abs(cosine - images));
                    worst_lib_images = std::max(worst_lib_images, std::abs(images - ref));
                    min_value = std::min(min_value, images);
                    min_cosine = std::min(min_cosine, cosine);
                }
            }
        }
    }
    o.expect("max|cos-img|", worst, "<=", 1e-10);
    o.expect("max|img-oracle|", worst_lib_images, "<=", 1e-12);
    o.expect("min_kernel", min_value, ">", 0.0);
    o.detail << "min_cosine=" << min_cosine << " ";
    return o;
}

Outcome ac2_semigroup() {
    Outcome o;
    const Grid g = wide_grid();
    const ReflectedHeatKernel k(-4.0, 4.0, kTheta);
    const Eigen::MatrixXd a1 = kernel_matrix(k, g, 1.0);
    const Eigen::MatrixXd ah = kernel_matrix(k, g, 0.5);
    const double rows = (a1.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double ck = (ah * ah - a1).cwiseAbs().maxCoeff();
    o.expect("row_sum_dev", rows, "<=", 1e-8);
    o.expect("ck_dev", ck, "<=", 1e-6);
    return o;
}

Outcome ac3_bridge_1d() {
    Outcome o;
    const Grid g = wide_grid();
    const auto rho0 = skewed_rho0(g);
    const auto rho1 = periodic_rho1(g);
    SolverConfig cfg;
    cfg.series_terms = 100;
    cfg.fp_max_iter = 200;
    const auto sol = solve(rho0, rho1, cfg, KernelEngine(g, kTheta, 100));

    bool decreasing = true;
    double log_ratio = 0.0;
    const auto& tr = sol.residual_trace;
    auto res = [&](std::size_t k) { return std::max(tr[k].phi1, tr[k].phihat0); };
    for (std::size_t k = 1; k < tr.size(); ++k) decreasing = decreasing && res(k) < res(k - 1);
    if (tr.size() > 1) log_ratio = std::log(res(tr.size() - 1) / res(0)) / static_cast<double>(tr.size() - 1);
    o.expect("strictly_decreasing", decreasing);
    o.expect("mean_ratio", std::exp(log_ratio), "<", 1.0);
    o.expect("final_residual", res(tr.size() - 1), "<=", 1e-9);
    o.expect("iterations", static_cast<double>(sol.iterations), "<=", 200);

    const double h = g.spacing(0);
    std::vector<double> p0(g.size());
    std::vector<double> p1(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        p0[i] = sol.phi.front()[i] * sol.phihat.front()[i];
        p1[i] = sol.phi.back()[i] * sol.phihat.back()[i];
    }
    o.expect("L1_t0", l1_nodes(p0, rho0.values(), h), "<=", 1e-6);
    o.expect("L1_t1", l1_nodes(p1, rho1.values(), h), "<=", 1e-6);
    double mass_dev = 0.0;
    for (const auto& r : sol.rho) mass_dev = std::max(mass_dev, std::abs(trapezoid(r.values(), h) - 1.0));
    o.expect("mass_dev", mass_dev, "<=", 1e-6);
    return o;
}

Outcome ac4_monte_carlo() {
    Outcome o;
    const Grid g = wide_grid();
    const auto rho0 = skewed_rho0(g);
    const auto rho1 = periodic_rho1(g);
    SolverConfig cfg;
    cfg.snapshots = 1001;
    const auto sol = solve(rho0, rho1, cfg, KernelEngine(g, kTheta, 100));
    const ControlField control = ControlField::from_solution(sol);
    o.expect("dt", cfg.dt(), "<=", 1e-3);

    const std::uint64_t seed = 20260;
    const auto closed = simulate(rho0, 10000, DriftSpec::zero(), &control, cfg, seed, 100);
    const auto open = simulate(rho0, 10000, DriftSpec::zero(), nullptr, cfg, seed, 100);

    std::size_t outside = 0;
    for (const auto* e : {&closed, &open}) {
        for (std::size_t r = 0; r < e->n_records(); ++r) {
            for (const auto& x : e->positions(r)) outside += (x[0] < -4.0 || x[0] > 4.0);
        }
    }
    o.expect("violations", static_cast<double>(closed.containment_violations() + open.containment_violations() + outside),
             "<=", 0.0);
    o.expect("complementarity", static_cast<double>(closed.complementarity_violations()), "<=", 0.0);

    std::vector<double> terminal;
    const std::size_t last = closed.n_records() - 1;
    for (std::size_t p = 0; p < closed.n_paths(); ++p) terminal.push_back(closed.state(p, last, 0));
    // KS statistic against the closed-form CDF.
    std::sort(terminal.begin(), terminal.end());
    double ks = 0.0;
    const double n = static_cast<double>(terminal.size());
    for (std::size_t i = 0; i < terminal.size(); ++i) {
        const double f = rho1_cdf(terminal[i]);
        ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    o.expect("KS_closed", ks, "<=", 0.02);

    // Open-loop marginal on 17 bins vs the bin averages of rho1.
    const Grid coarse = Grid::uniform(g.domain(), 17);
    const double hc = coarse.spacing(0);
    std::vector<double> hist(17, 0.0);
    for (std::size_t p = 0; p < open.n_paths(); ++p) {
        const double x = open.state(p, open.n_records() - 1, 0);
        const auto bin = static_cast<std::size_t>(std::lround((x + 4.0) / hc));
        hist[bin] += 1.0;
    }
    std::vector<double> target(17);
    for (std::size_t i = 0; i < 17; ++i) {
        const double xc = -4.0 + hc * static_cast<double>(i);
        const double lo = std::max(-4.0, xc - hc / 2);
        const double hi = std::min(4.0, xc + hc / 2);
        hist[i] /= n * (hi - lo);
        target[i] = (rho1_cdf(hi) - rho1_cdf(lo)) / (hi - lo);
    }
    o.expect("L1_open_vs_rho1", l1_nodes(hist, target, hc), ">=", 0.1);
    return o;
}

Outcome ac5_engines() {
    Outcome o;
    const Grid g = wide_grid();
    const auto rho0 = skewed_rho0(g);
    const auto rho1 = periodic_rho1(g);
    SolverConfig cfg;
    const auto a = solve(rho0, rho1, cfg, KernelEngine(g, kTheta, 100));
    const FpkProblem problem(g, DriftSpec::zero(), kTheta, 1e-3);
    const auto b = solve(rho0, rho1, cfg, problem);
    const std::size_t mid = 5;
    o.expect("t_mid", a.times[mid], ">=", 0.5);
    o.expect("Linf_rho_t0.5", linf_nodes(a.rho[mid].values(), b.rho[mid].values()), "<=", 1e-3);

    // Backward factor of the converged phi1 through the p-transform march,
    // against a direct quadrature of the kernel integral. phi1 is only fixed
    // up to scale, so it is taken with unit mass.
    const auto phi1 = normalize(a.factors.phi1);
    const auto marched = march(problem, phi1, 0.0, 1.0, MarchMode::BackwardFactor).back();
    const auto x = g.axis_coordinates(0);
    const auto w = oracle::trapezoid_weights(-4.0, 4.0, g.size());
    std::vector<double> direct(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            direct[i] += oracle::mirror_sum(x[i], x[j], -4.0, 4.0, kTheta, 1.0, 4) * w[j] * phi1[j];
        }
    }
    o.expect("Linf_phi0", linf_nodes(marched.values(), direct), "<=", 5e-4);
    o.detail << "rel_phi0=" << linf_nodes(marched.values(), direct) / *std::max_element(direct.begin(), direct.end()) << " ";
    return o;
}

Outcome ac6_gradient_invariants() {
    Outcome o;
    const Grid g(BoxDomain::square(-4.0, 4.0), {201, 201});
    const DriftSpec drift = cubic_drift();
    const FpkProblem problem(g, drift, kTheta, 1e-3);
    const FvStepper stepper(problem);

    // Gibbs weights exp(-V/theta), normalized here.
    std::vector<double> gibbs(g.size());
    double mass = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.node(k);
        gibbs[k] = std::exp(-(x[0] * x[0] + x[1] * x[1] * x[1]) / 5.0 / kTheta);
        mass += g.weight(k) * gibbs[k];
    }
    for (double& v : gibbs) v /= mass;
    const GridDensity gd(g, gibbs);
    const auto next = stepper.step_forward(gd);
    const double peak = *std::max_element(gibbs.begin(), gibbs.end());
    const double gap = linf_nodes(next.values(), gibbs);
    o.expect("gibbs_gap", gap, "<=", 1e-9);
    o.detail << "gibbs_rel_gap=" << gap / peak << " ";

    const LyapunovFunctional L{drift, kTheta};
    std::vector<double> r0(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.node(k);
        r0[k] = oracle::rho0_shape(x[0]) * oracle::rho0_shape(x[1]);
    }
    GridDensity d = normalize(GridDensity(g, r0));
    double prev = lyapunov_value(L, d);
    double worst_rise = -INFINITY;
    for (int s = 0; s < 1000; ++s) {
        d = stepper.step_forward(d);
        const double f = lyapunov_value(L, d);
        worst_rise = std::max(worst_rise, f - prev);
        prev = f;
    }
    o.expect("max_step_rise", worst_rise, "<=", 1e-10);
    return o;
}

Outcome ac7_jko() {
    Outcome o;
    const Grid g = wide_grid();
    const auto rho0 = skewed_rho0(g);
    const double h = g.spacing(0);
    for (int which = 0; which < 2; ++which) {
        const DriftSpec drift = which == 0 ? DriftSpec::zero() : quadratic_1d();
        std::vector<double> dist;
        for (double tau : {4e-3, 2e-3, 1e-3}) {
            const FpkProblem p(g, drift, kTheta, tau);
            const auto steps = static_cast<std::size_t>(std::lround(1.0 / tau));
            const auto jko = jko_march(p, rho0, tau, steps);
            const auto fv = march(p, rho0, 0.0, 1.0, MarchMode::Forward).back();
            dist.push_back(l1_nodes(jko.values(), fv.values(), h));
        }
        const std::string tag = which == 0 ? "V0" : "Vq";
        for (std::size_t k = 0; k < dist.size(); ++k) o.detail << tag << "_L1[" << k << "]=" << dist[k] << " ";
        for (std::size_t k = 1; k < dist.size(); ++k) {
            o.expect(tag + "_order" + std::to_string(k), std::log2(dist[k - 1] / dist[k]), ">=", 0.8);
        }
    }
    return o;
}

Outcome ac8_scenario_2d() {
    Outcome o;
    const fs::path out = fs::path(RBRIDGE_TEST_TMP) / "acceptance_2d";
    fs::remove_all(out);
    std::ostringstream log;
    std::ostringstream err;
    const int code = cli::run_solve({"paper-2d", out, std::nullopt}, log, err);
    o.expect("exit_code", static_cast<double>(code), "<=", 0.0);
    if (code != 0) {
        o.detail << "stderr: " << err.str();
        return o;
    }
    const auto manifest = cli::read_json(out / "manifest.json");
    o.detail << "iterations=" << manifest["iterations"] << " ";
    o.expect("L1_t0", manifest["endpoint_l1"]["rho0"].get<double>(), "<=", 1e-3);
    o.expect("L1_t1", manifest["endpoint_l1"]["rho1"].get<double>(), "<=", 1e-3);

    std::size_t files = 0;
    double mass_dev = 0.0;
    for (std::size_t k = 0; fs::exists(out / cli::snapshot_file_name(k)); ++k) {
        ++files;
        const auto t = cli::read_csv(out / cli::snapshot_file_name(k));
        const std::size_t c = t.column("rho");
        const std::size_t cx = t.column("x1");
        const std::size_t cy = t.column("x2");
        const double h = 8.0 / 200.0;
        double m = 0.0;
        for (const auto& row : t.rows) {
            const double wx = (row[cx] == -4.0 || row[cx] == 4.0) ? 0.5 : 1.0;
            const double wy = (row[cy] == -4.0 || row[cy] == 4.0) ? 0.5 : 1.0;
            m += wx * wy * h * h * row[c];
        }
        mass_dev = std::max(mass_dev, std::abs(m - 1.0));
    }
    o.expect("snapshot_files", static_cast<double>(files), ">=", 11);
    o.expect("snapshot_files_max", static_cast<double>(files), "<=", 11);
    o.expect("mass_dev", mass_dev, "<=", 1e-6);
    return o;
}

Outcome ac9_projective() {
    Outcome o;
    const Grid g = wide_grid();
    const auto rho0 = skewed_rho0(g);
    const auto rho1 = periodic_rho1(g);
    const KernelEngine engine(g, kTheta, 100);
    SolverConfig cfg;
    const auto a = solve(rho0, rho1, cfg, engine, GridDensity::constant(g, 1.0));
    const auto b = solve(rho0, rho1, cfg, engine, GridDensity::constant(g, 7.0));
    double drho = 0.0;
    double du = 0.0;
    for (std::size_t k = 0; k < a.rho.size(); ++k) {
        drho = std::max(drho, linf_nodes(a.rho[k].values(), b.rho[k].values()));
        for (std::size_t i = 0; i < g.size(); ++i) du = std::max(du, std::abs(a.control[k][i][0] - b.control[k][i][0]));
    }
    o.expect("Linf_rho", drho, "<=", 1e-8);
    o.expect("Linf_u", du, "<=", 1e-8);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, 10.0, ac1_kernel_oracle}, {2, 30.0, ac2_semigroup},          {3, 120.0, ac3_bridge_1d},
        {4, 120.0, ac4_monte_carlo},  {5, 600.0, ac5_engines},           {6, 600.0, ac6_gradient_invariants},
        {7, 600.0, ac7_jko},          {8, 1800.0, ac8_scenario_2d},         {9, 120.0, ac9_projective},
    };
    // Optional arguments select criteria by number.
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what() << " ";
        }
        const double wall = seconds_since(t0);
        o.expect("runtime_s", wall, "<", c.budget_s);
        failures += !o.pass;
        std::cout << "AC" << c.id << (o.pass ? " PASS " : " FAIL ") << o.detail.str() << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
