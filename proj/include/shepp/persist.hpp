#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace shepp {

/// Numeric table with named columns; the CSV form is the header line followed
/// by one row per record, every value printed with 17 significant digits so
/// that reading it back reproduces the doubles exactly.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_table_csv(const Table& table, const std::filesystem::path& file);
Table read_table_csv(const std::filesystem::path& file);

/// 64-bit FNV-1a of the compact dump of `config` (object keys sorted), as 16 hex digits.
std::string config_digest(const nlohmann::json& config);

/// Writes the run manifest:
///   {"tool": "shepp", "version": ..., "experiment": ..., "config": {...},
///    "config_digest": ..., "seed": ..., "outputs": [...], "created_utc": ...}
/// The timestamp lives only here, never in the CSV outputs.
void write_manifest(const std::filesystem::path& file, const std::string& experiment,
                    const nlohmann::json& config, std::uint64_t seed,
                    const std::vector<std::string>& outputs);

std::string library_version();

}  // namespace shepp
