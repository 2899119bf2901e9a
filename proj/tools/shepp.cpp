#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "shepp/cli.hpp"
#include "shepp/errors.hpp"

namespace {

std::string keys_help() {
  std::ostringstream out;
  out << "\nConfiguration keys (YAML, unknown keys are rejected):\n";
  for (const auto& k : shepp::config_keys()) {
    out << "  " << k.key;
    for (std::size_t i = k.key.size(); i < 20; ++i) out << ' ';
    out << " default " << k.default_value << "\n      " << k.description << "\n";
  }
  out << "\nPresets:";
  for (const auto& p : shepp::preset_names()) out << ' ' << p;
  out << "\n\nExit status: 0 ok, 1 run error (or unmet criteria with --strict), 2 config error.\n";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extremes of Shepp statistics: simulation, tail asymptotics and Pickands constants"};
  app.footer(keys_help());
  std::string config_path, preset, out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool strict = false;
  auto* config_opt = app.add_option("--config", config_path, "YAML run configuration");
  app.add_option("--preset", preset, "shipped configuration name")->excludes(config_opt);
  auto* seed_opt = app.add_option("--seed", seed, "override mc.seed");
  auto* threads_opt = app.add_option("--threads", threads, "override mc.threads (also SHEPP_THREADS)");
  auto* out_opt = app.add_option("--out", out_dir, "override output.dir");
  app.add_flag("--strict", strict, "exit 1 when the experiment's own criteria are not met");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  shepp::RunConfig config;
  try {
    if (!config_path.empty())
      config = shepp::parse_config_file(config_path);
    else if (!preset.empty())
      config = shepp::parse_config(shepp::preset_document(preset));
    else
      throw shepp::ConfigError("one of --config or --preset is required", 0);
    if (*seed_opt) config.seed = seed;
    if (*threads_opt) config.threads = threads;
    if (*out_opt) config.out_dir = out_dir;
  } catch (const shepp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    const auto result = shepp::run(config, std::cout);
    std::cout << "\nwrote";
    for (const auto& f : result.files) std::cout << ' ' << config.out_dir << '/' << f;
    std::cout << "\n";
    if (strict && !result.criteria_met) return 1;
  } catch (const std::exception& e) {
    std::cerr << "run error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
