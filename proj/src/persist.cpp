#include "shepp/persist.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "shepp/errors.hpp"

namespace shepp {

std::string library_version() { return "1.0.0"; }

void write_table_csv(const Table& table, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << '\n';
  char cell[40];
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw IoError("row width does not match header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(cell, sizeof cell, "%.17g", row[c]);
      out << (c ? "," : "") << cell;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + file.string());
}

Table read_table_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(file.string() + " is empty");
  std::stringstream header(line);
  for (std::string name; std::getline(header, name, ',');) t.columns.push_back(name);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw IoError("non-numeric cell '" + cell + "' in " + file.string());
      row.push_back(v);
    }
    if (row.size() != t.columns.size()) throw IoError("ragged row in " + file.string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string config_digest(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const std::filesystem::path& file, const std::string& experiment,
                    const nlohmann::json& config, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);

  nlohmann::json m;
  m["tool"] = "shepp";
  m["version"] = library_version();
  m["experiment"] = experiment;
  m["config"] = config;
  m["config_digest"] = config_digest(config);
  m["seed"] = seed;
  m["outputs"] = outputs;
  m["created_utc"] = stamp;

  std::ofstream out(file);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  out << m.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + file.string());
}

}  // namespace shepp
