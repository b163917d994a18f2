#include <string>

#include <json.hpp>

#include "rbridge/io.hpp"
#include "rbridge/sde.hpp"

namespace rbridge {

std::string ensemble_csv(const PathEnsemble& e) {
    const std::size_t dim = e.dim();
    std::string out = dim == 1 ? "path_id,step,t,x1,dL,dU\n" : "path_id,step,t,x1,x2,dL1,dU1,dL2,dU2\n";
    for (std::size_t p = 0; p < e.n_paths(); ++p) {
        for (std::size_t r = 0; r < e.n_records(); ++r) {
            out += std::to_string(p);
            out += ',';
            out += std::to_string(e.record_steps()[r]);
            out += ',';
            out += format_double(e.record_time(r));
            for (std::size_t a = 0; a < dim; ++a) {
                out += ',';
                out += format_double(e.state(p, r, a));
            }
            for (std::size_t a = 0; a < dim; ++a) {
                const double dl = r == 0 ? 0.0 : e.local_time_lower(p, r, a) - e.local_time_lower(p, r - 1, a);
                const double du = r == 0 ? 0.0 : e.local_time_upper(p, r, a) - e.local_time_upper(p, r - 1, a);
                out += ',';
                out += format_double(dl);
                out += ',';
                out += format_double(du);
            }
            out += '\n';
        }
    }
    return out;
}

void export_ensemble(const PathEnsemble& e, const SolverConfig& config, const std::filesystem::path& csv_path) {
    write_file_atomic(csv_path, ensemble_csv(e));
    nlohmann::json side;
    side["format_version"] = 1;
    side["csv"] = csv_path.filename().string();
    side["seed"] = e.seed();
    side["n_paths"] = e.n_paths();
    side["steps"] = e.steps();
    side["dt"] = e.dt();
    side["record_every"] = e.record_steps().size() > 1 ? e.record_steps()[1] - e.record_steps()[0] : 0;
    side["dim"] = e.dim();
    std::vector<double> lower;
    std::vector<double> upper;
    for (std::size_t a = 0; a < e.dim(); ++a) {
        lower.push_back(e.domain().lower(a));
        upper.push_back(e.domain().upper(a));
    }
    side["domain"] = {{"lower", lower}, {"upper", upper}};
    side["config"] = {{"theta", config.theta}, {"time_steps", config.time_steps}};
    side["containment_violations"] = e.containment_violations();
    side["complementarity_violations"] = e.complementarity_violations();
    auto sidecar = csv_path;
    sidecar += ".json";
    write_file_atomic(sidecar, side.dump(2) + "\n");
}

}  // namespace rbridge
