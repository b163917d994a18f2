#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbridge/bridge.hpp"

namespace rbridge::cli {

inline constexpr int kFormatVersion = 1;

/// Numeric CSV with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column index by name; throws ConfigError if absent.
    [[nodiscard]] std::size_t column(const std::string& name) const;
};

[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);
[[nodiscard]] std::string csv_text(const std::vector<std::string>& header,
                                   const std::vector<std::vector<double>>& columns);

/// Node coordinates, rho, phi, phihat and control at snapshot k.
[[nodiscard]] std::string snapshot_csv(const BridgeSolution& sol, std::size_t k);
[[nodiscard]] std::string residuals_csv(const BridgeSolution& sol);
[[nodiscard]] std::string factors_csv(const FactorPair& fp);
[[nodiscard]] std::string snapshot_file_name(std::size_t k);

/// Node coordinate columns ("x1", "x2") for a grid.
[[nodiscard]] std::vector<std::vector<double>> coordinate_columns(const Grid& g);
[[nodiscard]] std::vector<std::string> coordinate_names(const Grid& g);

[[nodiscard]] nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace rbridge::cli
