#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shepp/asymptotics.hpp"
#include "shepp/models.hpp"
#include "shepp/pickands.hpp"

namespace shepp {

enum class ExperimentKind { Tail, LimitLaw, Pickands, CheckModel, OracleCompare, Convergence };

std::string to_string(ExperimentKind kind);

/// Fully resolved run description. Every field is either read from the
/// document or filled from the defaults table (config_keys()).
struct RunConfig {
  ExperimentKind kind = ExperimentKind::Tail;
  FieldModel model = IncrementVariance::fbm(0.5);

  double a = 0.5, b = 1.0, T = 10.0;
  double mesh_d = 0.25;
  std::size_t n_tau = 0, n_s = 0;  // both > 0 selects a fixed grid

  std::vector<double> u_ladder{2.0, 2.5, 3.0, 3.5};

  std::vector<double> T_ladder{50.0, 200.0, 800.0};
  double r = 0.0;
  LocationForm location = LocationForm::Consistent;

  double pk_alpha = 1.0;
  double pk_lambda = 0.0;  // 0 selects default_lambda(alpha)
  double pk_eta = 1.0 / 64.0;
  std::vector<std::size_t> pk_strides{1};
  PickandsMethod pk_method = PickandsMethod::Ratio;

  std::vector<double> d_ladder{1.0, 0.5, 0.25, 0.125};
  double conv_u = 2.5;

  std::vector<double> oracle_u{1.5, 2.0, 2.5};
  std::size_t oracle_n_tau = 4, oracle_n_s = 4;

  std::optional<double> pickands_sq;  // empty: exact value for alpha in {1, 2}
  std::vector<double> berman_v{10.0, 100.0, 1000.0, 10000.0};

  std::size_t n = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out_dir = "out";
  std::string ledger;  // optional Pickands ledger appended across runs

  /// Canonical echo of every resolved setting; hashed into the manifest digest.
  nlohmann::json to_json() const;
};

/// Strict YAML parsing: unknown keys, wrong types and violated model
/// invariants raise ConfigError carrying the 1-based line of the entry.
RunConfig parse_config(const std::string& document);
RunConfig parse_config_file(const std::filesystem::path& file);

struct ConfigKey {
  std::string key;
  std::string default_value;
  std::string description;
};

/// Every accepted key with its default, in documentation order.
const std::vector<ConfigKey>& config_keys();

std::vector<std::string> preset_names();
/// YAML text of a shipped preset; throws ConfigError for an unknown name.
std::string preset_document(const std::string& name);

struct RunResult {
  bool criteria_met = true;  ///< verdict of the experiment's own checks
  std::vector<std::string> files;
};

/// Runs the experiment, writes CSV output and manifest.json under out_dir and
/// prints a human summary to `log`.
RunResult run(const RunConfig& config, std::ostream& log);

}  // namespace shepp
