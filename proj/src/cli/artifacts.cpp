#include "rbridge/cli/artifacts.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rbridge/errors.hpp"
#include "rbridge/io.hpp"

namespace rbridge::cli {

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error(ErrorCode::ConfigError, "CSV has no column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingSolution, "cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ConfigError, path.string() + " is empty");
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(t.header.size());
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p <= end) {
            double v = 0.0;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc()) {
                throw Error(ErrorCode::ConfigError, path.string() + ":" + std::to_string(lineno) + ": bad number");
            }
            row.push_back(v);
            p = res.ptr + 1;
        }
        if (row.size() != t.header.size()) {
            throw Error(ErrorCode::ConfigError, path.string() + ":" + std::to_string(lineno) + ": wrong column count");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            out += format_double(columns[c][r]);
        }
        out += '\n';
    }
    return out;
}

std::vector<std::vector<double>> coordinate_columns(const Grid& g) {
    std::vector<std::vector<double>> cols(g.dim(), std::vector<double>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.node(k);
        for (std::size_t a = 0; a < g.dim(); ++a) cols[a][k] = x[a];
    }
    return cols;
}

std::vector<std::string> coordinate_names(const Grid& g) {
    return g.dim() == 1 ? std::vector<std::string>{"x1"} : std::vector<std::string>{"x1", "x2"};
}

std::string snapshot_csv(const BridgeSolution& sol, std::size_t k) {
    const Grid& g = sol.grid();
    auto header = coordinate_names(g);
    auto cols = coordinate_columns(g);
    header.insert(header.end(), {"rho", "phi", "phihat"});
    cols.push_back(sol.rho[k].values());
    cols.push_back(sol.phi[k].values());
    cols.push_back(sol.phihat[k].values());
    for (std::size_t a = 0; a < g.dim(); ++a) {
        header.push_back("u" + std::to_string(a + 1));
        std::vector<double> u(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) u[i] = sol.control[k][i][a];
        cols.push_back(std::move(u));
    }
    return csv_text(header, cols);
}

std::string residuals_csv(const BridgeSolution& sol) {
    std::vector<std::vector<double>> cols(3);
    for (const auto& r : sol.residual_trace) {
        cols[0].push_back(static_cast<double>(r.iteration));
        cols[1].push_back(r.phi1);
        cols[2].push_back(r.phihat0);
    }
    return csv_text({"iteration", "d_hilbert_phi1", "d_hilbert_phihat0"}, cols);
}

std::string factors_csv(const FactorPair& fp) {
    auto header = coordinate_names(fp.phi1.grid());
    auto cols = coordinate_columns(fp.phi1.grid());
    header.insert(header.end(), {"phi1", "phihat0"});
    cols.push_back(fp.phi1.values());
    cols.push_back(fp.phihat0.values());
    return csv_text(header, cols);
}

std::string snapshot_file_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu.csv", k);
    return buf;
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingSolution, "cannot read " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, path.string() + " is not valid JSON: " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace rbridge::cli
