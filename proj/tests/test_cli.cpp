#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "shepp/cli.hpp"
#include "shepp/errors.hpp"

using namespace shepp;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("shepp_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int config_error_line(const std::string& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

#ifdef SHEPP_CLI_PATH
int run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string(SHEPP_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal documents are completed from the defaults table") {
    const auto c = parse_config("experiment: tail\n");
    CHECK(c.kind == ExperimentKind::Tail);
    CHECK(model_id(c.model) == model_id(IncrementVariance::fbm(0.5)));
    CHECK(c.a == 0.5);
    CHECK(c.b == 1.0);
    CHECK(c.T == 10.0);
    CHECK(c.mesh_d == 0.25);
    CHECK(c.u_ladder == std::vector<double>{2.0, 2.5, 3.0, 3.5});
    CHECK(c.n == 10000);
    CHECK(c.seed == 1);
    CHECK(c.out_dir == "out");
    CHECK(c.pk_method == PickandsMethod::Ratio);
    CHECK(c.location == LocationForm::Consistent);
    CHECK(parse_config("").kind == ExperimentKind::Tail);

    const auto j = c.to_json();
    CHECK(j["experiment"] == "tail");
    CHECK(j["model"]["family"] == "fbm");
    CHECK(j["window"]["T"] == 10.0);
    CHECK(j["pickands"]["lambda"] == 64.0);
    CHECK(j["mc"]["n"] == 10000);
    CHECK(j["pickands_sq"] == "exact");
  }

  TEST_CASE("every documented key has a default and every preset parses") {
    CHECK(config_keys().size() >= 30);
    for (const auto& k : config_keys()) {
      CAPTURE(k.key);
      CHECK_FALSE(k.default_value.empty());
      CHECK_FALSE(k.description.empty());
    }
    for (const auto& name : preset_names()) {
      CAPTURE(name);
      CHECK_NOTHROW(parse_config(preset_document(name)));
    }
    CHECK_THROWS_AS(preset_document("nope"), ConfigError);
  }

  TEST_CASE("invalid documents are rejected with the offending line") {
    CHECK(config_error_line("experiment: tail\nmodel: {family: mixed-fbm, weights: [0.6, 0.9], hursts: [0.5, 0.7]}\n") == 2);
    CHECK(config_error_line("experiment: tail\nwindow:\n  a: 1.0\n  b: 1.0\n") == 4);
    CHECK(config_error_line("experiment: tail\nmc:\n  n: 10\n  sede: 3\n") == 4);
    CHECK(config_error_line("experiment: tail\nbogus: 1\n") == 2);
    CHECK(config_error_line("model:\n  family: integrated\n  zeta:\n    family: fou\n    alfa: 1\n") == 5);
    CHECK(config_error_line("model:\n  family: fbm\n  alpha: 1\n") == 3);
    CHECK(config_error_line("mc:\n  n: many\n") == 2);
    CHECK(config_error_line("experiment: sideways\n") == 1);
    CHECK(config_error_line("tail:\n  u: [3, 2]\n") == 2);
    CHECK(config_error_line("pickands:\n  alpha: 1\n  lambda: 64\n  eta: 0.5\n") == 4);
    CHECK(config_error_line("convergence:\n  d: [1, 0.3]\n") == 2);
    CHECK(config_error_line("oracle:\n  n_tau: 9\n  n_s: 9\n") == 2);
    CHECK(config_error_line("experiment: limitlaw\nmodel: {family: example21}\n") == 2);
    CHECK(config_error_line("experiment: tail\nmodel: {family: fbm, hurst: 0.7}\n") == 2);
    CHECK(config_error_line("experiment: tail\nmodel: {family: fbm, hurst: 0.7}\npickands_sq: 0.8\n") == -1);
    CHECK(config_error_line("experiment: [unclosed\n") >= 1);
  }
}

TEST_SUITE("driver") {
  TEST_CASE("pickands run prints the exact anchor") {
    auto c = parse_config("experiment: pickands\npickands: {alpha: 2, lambda: 2, eta: 0.0078125}\nmc: {n: 200}\n");
    c.out_dir = scratch_dir("pk").string();
    std::ostringstream log;
    const auto res = run(c, log);
    CHECK(log.str().find("exact H_alpha    0.564189583547756") != std::string::npos);
    CHECK(std::find(res.files.begin(), res.files.end(), "pickands.csv") != res.files.end());
    CHECK(std::filesystem::exists(std::filesystem::path(c.out_dir) / "manifest.json"));
  }

  TEST_CASE("tail run prints C to 15 digits and is reproducible") {
    const std::string doc =
        "experiment: tail\nmodel: {family: fbm, hurst: 0.5}\nwindow: {a: 0.5, b: 1.0, T: 2}\n"
        "tail: {u: [2.0, 2.5]}\nmc: {n: 1000, seed: 7}\n";
    auto c = parse_config(doc);
    std::string first;
    for (unsigned threads : {1u, 2u}) {
      c.threads = threads;
      c.out_dir = scratch_dir("tail" + std::to_string(threads)).string();
      std::ostringstream log;
      run(c, log);
      CHECK(log.str().find("tail constant C  0.25") != std::string::npos);
      const auto csv = slurp(std::filesystem::path(c.out_dir) / "tail.csv");
      CHECK(csv.rfind("u,p_hat,stderr,asym,ratio\n", 0) == 0);
      if (first.empty())
        first = csv;
      else
        CHECK(csv == first);
    }
  }

  TEST_CASE("check-model run reports the local structure") {
    auto c = parse_config(preset_document("check-fbm"));
    c.berman_v = {10.0, 100.0};
    c.out_dir = scratch_dir("check").string();
    std::ostringstream log;
    run(c, log);
    CHECK(log.str().find("declared alpha            1.4") != std::string::npos);
  }
}

#ifdef SHEPP_CLI_PATH
TEST_SUITE("cli") {
  TEST_CASE("exit codes and help") {
    const auto dir = scratch_dir("exe");
    CHECK(run_cli("--help", dir / "help.txt") == 0);
    const auto help = slurp(dir / "help.txt");
    for (const auto& k : config_keys()) {
      CAPTURE(k.key);
      CHECK(help.find(k.key) != std::string::npos);
    }
    for (const auto& p : preset_names()) CHECK(help.find(p) != std::string::npos);

    CHECK(run_cli("", dir / "none.txt") == 2);
    CHECK(run_cli("--frobnicate", dir / "flag.txt") == 2);
    CHECK(run_cli("--preset nope", dir / "preset.txt") == 2);
    {
      std::ofstream bad(dir / "bad.yaml");
      bad << "experiment: tail\nmodel:\n  family: fbm\n  hurts: 0.5\n";
    }
    CHECK(run_cli("--config " + (dir / "bad.yaml").string(), dir / "bad.txt") == 2);
    CHECK(slurp(dir / "bad.txt").find("line 4") != std::string::npos);
    {
      std::ofstream ok(dir / "ok.yaml");
      ok << "experiment: check-model\nmodel: {family: fou, alpha: 1}\nwindow: {a: 1, b: 2}\ncheck: {berman_v: [10, 100]}\n";
    }
    CHECK(run_cli("--config " + (dir / "ok.yaml").string() + " --out " + (dir / "run").string(), dir / "ok.txt") ==
          0);
    CHECK(std::filesystem::exists(dir / "run" / "manifest.json"));
  }
}
#endif
