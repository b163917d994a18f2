#include "rbridge/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rbridge/errors.hpp"

namespace rbridge::cli {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) config_error("missing field '" + where + key + "'");
    return obj.at(key);
}

double number(const json& v, const std::string& name) {
    if (!v.is_number()) config_error("field '" + name + "' must be a number");
    return v.get<double>();
}

std::size_t count(const json& v, const std::string& name) {
    if (!v.is_number_integer() || v.get<long long>() < 0) config_error("field '" + name + "' must be a nonnegative integer");
    return v.get<std::size_t>();
}

std::string text(const json& v, const std::string& name) {
    if (!v.is_string()) config_error("field '" + name + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& name) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) config_error("field '" + name + "' must be a number or an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, name));
    return out;
}

Expression expression(const json& v, const std::string& name, std::size_t dim) {
    Expression e = Expression::parse(text(v, name));
    if (dim == 1 && e.uses(1)) config_error("field '" + name + "' uses x2 in a 1D scenario");
    return e;
}

void check_density_expr(const Expression& e, const Grid& g, const std::string& name) {
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.node(k);
        const double v = e.eval(std::span<const double>(x.data(), g.dim()));
        if (!std::isfinite(v) || v < 0.0) {
            config_error("field '" + name + "' evaluates to " + std::to_string(v) + " at a grid node; need finite and >= 0");
        }
        total += v;
    }
    if (!(total > 0.0)) config_error("field '" + name + "' vanishes on the whole grid");
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

DriftSpec Scenario::drift() const {
    if (!potential) return DriftSpec::zero();
    const Expression v = *potential;
    const Expression d1 = v.derivative(0);
    const Expression d2 = v.derivative(1);
    return DriftSpec::from_potential([v](std::span<const double> x) { return v.eval(x); },
                                     [d1, d2](std::span<const double> x) {
                                         return std::array<double, 2>{d1.eval(x), x.size() > 1 ? d2.eval(x) : 0.0};
                                     });
}

GridDensity Scenario::rho0_density() const {
    const Expression e = rho0;
    return normalize(GridDensity::sample(grid(), [&e](std::span<const double> x) { return e.eval(x); }));
}

GridDensity Scenario::rho1_density() const {
    const Expression e = rho1;
    return normalize(GridDensity::sample(grid(), [&e](std::span<const double> x) { return e.eval(x); }));
}

std::unique_ptr<BridgeEngine> Scenario::make_engine() const {
    if (engine == EngineKind::Kernel) return std::make_unique<KernelEngine>(grid(), config.theta, config.series_terms);
    return std::make_unique<FpkEngine>(FpkProblem(grid(), drift(), config.theta, config.dt()));
}

std::string Scenario::problem_hash() const {
    json d = document;
    d.erase("simulation");
    d.erase("outputs");
    if (d.contains("solver")) d["solver"].erase("snapshots");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(d.dump())));
    return buf;
}

bool Scenario::wants(const std::string& output) const {
    return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
}

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) config_error("scenario must be a JSON object");
    const auto version = number(field(doc, "schema_version", ""), "schema_version");
    if (version != kSchemaVersion) {
        config_error("unsupported schema_version " + std::to_string(version) + ", expected " + std::to_string(kSchemaVersion));
    }
    const std::string name = text(field(doc, "name", ""), "name");

    const json& dom = field(doc, "domain", "");
    const auto lower = numbers(field(dom, "lower", "domain."), "domain.lower");
    const auto upper = numbers(field(dom, "upper", "domain."), "domain.upper");
    std::optional<BoxDomain> domain;
    try {
        domain.emplace(lower, upper);
    } catch (const Error& e) {
        config_error(std::string("domain: ") + e.what());
    }
    const std::size_t dim = domain->dim();

    std::vector<std::size_t> points(dim, 201);
    if (doc.contains("grid")) {
        const json& p = field(doc["grid"], "points", "grid.");
        if (p.is_array()) {
            if (p.size() != dim) config_error("field 'grid.points' needs one entry per axis");
            for (std::size_t a = 0; a < dim; ++a) points[a] = count(p[a], "grid.points");
        } else {
            points.assign(dim, count(p, "grid.points"));
        }
    }
    std::optional<Grid> grid;
    try {
        grid.emplace(*domain, points);
    } catch (const Error& e) {
        config_error(std::string("grid: ") + e.what());
    }

    SolverConfig config;
    config.theta = number(field(doc, "theta", ""), "theta");
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        if (!s.is_object()) config_error("field 'solver' must be an object");
        for (const auto& [key, value] : s.items()) {
            const std::string f = "solver." + key;
            if (key == "time_steps") config.time_steps = count(value, f);
            else if (key == "series_terms") config.series_terms = count(value, f);
            else if (key == "fp_tol") config.fp_tol = number(value, f);
            else if (key == "fp_max_iter") config.fp_max_iter = count(value, f);
            else if (key == "density_floor") config.density_floor = number(value, f);
            else if (key == "snapshots") config.snapshots = count(value, f);
            else config_error("unknown field '" + f + "'");
        }
    }
    try {
        config.validate();
    } catch (const Error& e) {
        config_error(std::string("solver: ") + e.what());
    }

    std::optional<Expression> potential;
    if (doc.contains("drift")) {
        const json& d = doc["drift"];
        const std::string kind = text(field(d, "kind", "drift."), "drift.kind");
        if (kind == "potential") {
            potential = expression(field(d, "V", "drift."), "drift.V", dim);
            const Expression g1 = potential->derivative(0);
            const Expression g2 = potential->derivative(1);
            for (std::size_t k = 0; k < grid->size(); ++k) {
                const auto x = grid->node(k);
                const std::span<const double> xs(x.data(), dim);
                const bool ok = std::isfinite(potential->eval(xs)) && std::isfinite(g1.eval(xs)) &&
                                std::isfinite(g2.eval(xs));
                if (!ok) config_error("field 'drift.V' or its gradient is not finite on the grid");
            }
        } else if (kind != "zero") {
            config_error("field 'drift.kind' must be \"zero\" or \"potential\", got \"" + kind + "\"");
        }
    }

    Expression rho0 = expression(field(doc, "rho0", ""), "rho0", dim);
    Expression rho1 = expression(field(doc, "rho1", ""), "rho1", dim);
    check_density_expr(rho0, *grid, "rho0");
    check_density_expr(rho1, *grid, "rho1");

    const std::string engine_name = text(field(doc, "engine", ""), "engine");
    EngineKind engine;
    if (engine_name == "kernel") {
        engine = EngineKind::Kernel;
        if (potential) config_error("engine \"kernel\" needs zero drift; use \"fpk\" for a potential");
    } else if (engine_name == "fpk") {
        engine = EngineKind::Fpk;
    } else {
        config_error("field 'engine' must be \"kernel\" or \"fpk\", got \"" + engine_name + "\"");
    }

    SimulationSettings sim;
    if (doc.contains("simulation")) {
        const json& s = doc["simulation"];
        if (!s.is_object()) config_error("field 'simulation' must be an object");
        for (const auto& [key, value] : s.items()) {
            const std::string f = "simulation." + key;
            if (key == "paths") sim.paths = count(value, f);
            else if (key == "seed") sim.seed = count(value, f);
            else if (key == "record_every") sim.record_every = count(value, f);
            else if (key == "control_snapshots") sim.control_snapshots = count(value, f);
            else if (key == "histogram_points") sim.histogram_points = count(value, f);
            else config_error("unknown field '" + f + "'");
        }
        if (sim.record_every == 0) config_error("field 'simulation.record_every' must be positive");
        if (sim.control_snapshots < 2) config_error("field 'simulation.control_snapshots' must be at least 2");
        if (sim.histogram_points < 3) config_error("field 'simulation.histogram_points' must be at least 3");
    }

    std::vector<std::string> outputs{"snapshots", "residuals", "factors"};
    if (doc.contains("outputs")) {
        outputs.clear();
        if (!doc["outputs"].is_array()) config_error("field 'outputs' must be an array");
        for (const auto& o : doc["outputs"]) {
            const std::string s = text(o, "outputs");
            if (s != "snapshots" && s != "residuals" && s != "factors") {
                config_error("unknown output '" + s + "'; expected snapshots, residuals or factors");
            }
            outputs.push_back(s);
        }
    }

    return Scenario{name,   *domain, points, std::move(potential), std::move(rho0), std::move(rho1), engine,
                    config, sim,     std::move(outputs), doc};
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open scenario file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        config_error("scenario " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

std::filesystem::path resolve_scenario_path(const std::string& name_or_path) {
    const std::filesystem::path p(name_or_path);
    if (std::filesystem::exists(p)) return p;
    const std::filesystem::path bundled = std::filesystem::path(RBRIDGE_SCENARIO_DIR) / (name_or_path + ".json");
    if (std::filesystem::exists(bundled)) return bundled;
    config_error("no scenario file or bundled scenario named '" + name_or_path + "'");
}

}  // namespace rbridge::cli
