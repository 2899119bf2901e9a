// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset; the exit status is 1 if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "shepp/asymptotics.hpp"
#include "shepp/experiments.hpp"
#include "shepp/fieldsim.hpp"
#include "shepp/mc.hpp"
#include "shepp/models.hpp"
#include "shepp/pickands.hpp"

using namespace shepp;

namespace {

constexpr std::uint64_t kSeed = 20251016;

struct Outcome {
  bool pass;
  std::string detail;
};

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Closed-form inner integrals I(t) = int_0^t (t - s) r(s) ds for the integrand correlations.
struct IntegrandFixture {
  const char* name;
  StationaryCovariance r;
  std::function<double(double)> inner;
};

std::vector<IntegrandFixture> integrand_fixtures() {
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  return {
      {"fou(1)", StationaryCovariance::fractional_ou(1.0), [](double t) { return t + std::expm1(-t); }},
      {"fou(2)", StationaryCovariance::fractional_ou(2.0),
       [=](double t) { return 0.5 * t * sqrt_pi * std::erf(t) + 0.5 * std::expm1(-t * t); }},
      {"cauchy(2,1)", StationaryCovariance::generalized_cauchy(2.0, 1.0),
       [](double t) { return t * std::atan(t) - 0.5 * std::log1p(t * t); }},
      {"cauchy(1,2)", StationaryCovariance::generalized_cauchy(1.0, 2.0),
       [](double t) { return t - std::log1p(t); }},
      {"flat table", StationaryCovariance::tabulated({0.0, 10.0}, {1.0, 1.0}, 1.0, 1.0),
       [](double t) { return 0.5 * t * t; }},
  };
}

Outcome criterion1() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double H = draw(0.05, 0.95), a = draw(0.1, 2.0), b = a + draw(0.1, 3.0);
    const double T = draw(1.0, 1000.0), u = draw(1.5, 10.0), hsq = draw(0.2, 2.0);
    const double expected = hsq * std::pow(0.5, 1.0 / H) * (1.0 / a - 1.0 / b) * T * std::pow(u, 2.0 / H) *
                            0.5 * std::erfc(u / std::numbers::sqrt2);
    worst = std::max(worst, rel(tail_prop32(IncrementVariance::fbm(H), a, b, T, u, hsq), expected));
  }
  return {worst < 1e-10, fmt("max relative deviation %.3g over 20 draws (tolerance 1e-10)", worst)};
}

Outcome criterion2() {
  std::mt19937_64 rng(kSeed + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  double worst = 0.0;
  std::string where;
  for (const auto& fx : integrand_fixtures()) {
    const auto model = IncrementVariance::integrated(fx.r);
    for (int k = 0; k < 8; ++k) {
      const double a = draw(0.1, 2.0), b = a + draw(0.1, 3.0), T = draw(1.0, 1000.0), u = draw(1.5, 8.0);
      double err = 0.0;
      const double outer = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double t) { return 1.0 / fx.inner(t); }, a, b, 20, 1e-14, &err);
      const double expected = T / std::numbers::pi * 0.25 * outer * u * u * 0.5 * std::erfc(u / std::numbers::sqrt2);
      const double dev = rel(tail_prop32(model, a, b, T, u, 1.0 / std::numbers::pi), expected);
      if (dev > worst) {
        worst = dev;
        where = fx.name;
      }
    }
  }
  return {worst < 1e-8, fmt("max relative deviation %.3g (%s) over 5 integrands x 8 draws (tolerance 1e-8)", worst,
                            where.c_str())};
}

Outcome criterion3() {
  const auto one = estimate_pickands(1.0, 64.0, 1.0 / 64.0, 10000, kSeed);
  const auto two = estimate_pickands(2.0, 16.0, 1.0 / 128.0, 10000, kSeed);
  const auto trunc = estimate_pickands(1.0, 64.0, 1.0 / 64.0, 10000, kSeed, PickandsMethod::Truncated);
  const bool ok = one.estimate >= 0.85 && one.estimate <= 1.05 && two.estimate >= 0.50 && two.estimate <= 0.60;
  return {ok, fmt("H_1 = %.5f +- %.5f in [0.85, 1.05]; H_2 = %.5f +- %.2g in [0.50, 0.60] "
                  "(truncated estimator diagnostic H_1 = %.5f +- %.5f)",
                  one.estimate, one.std_error, two.estimate, two.std_error, trunc.estimate, trunc.std_error)};
}

Outcome criterion4() {
  const std::vector<std::pair<const char*, FieldModel>> models{
      {"Brownian", IncrementVariance::fbm(0.5)},
      {"fBm 0.7", IncrementVariance::fbm(0.7)},
      {"fOU 1", StationaryCovariance::fractional_ou(1.0)},
      {"two-path", Example21Field{StationaryCovariance::fractional_ou(1.0)}}};
  const std::vector<double> u{1.5, 2.0, 2.5};
  const auto grid = SheppGrid::make(0.5, 1.0, 3.5, 8, 8);
  bool ok = true;
  std::string detail = "max z:";
  std::uint64_t k = 0;
  for (const auto& [name, m] : models) {
    double zmax = 0.0;
    for (const auto& row : oracle_compare(m, grid, u, 10000, derive_seed(kSeed, k++))) {
      ok = ok && row.agree;
      zmax = std::max(zmax, row.z);
    }
    detail += fmt(" %s %.2f;", name, zmax);
  }
  return {ok, detail + " 8 x 8 grid, limit 3"};
}

Outcome criterion5() {
  const std::vector<double> u{2.5, 3.0, 3.5};
  const auto study =
      tail_ratio_study(IncrementVariance::fbm(0.5), MeshRule{0.5, 1.0, 10.0, 0.25}, u, 200000, 1.0, kSeed);
  std::string detail = "ratios";
  for (const auto& r : study.rows) detail += fmt(" %.4f", r.ratio);
  return {study.stable,
          detail + fmt(" in [0.4, 1.6], variation %.1f%% (limit 30%%)", 100.0 * study.ratio_variation)};
}

Outcome criterion6() {
  const std::vector<double> T{50.0, 200.0, 800.0};
  const auto report = empirical_limit_law(IncrementVariance::fbm(0.5), 0.5, 1.0, T, 0.25, 2000, 1.0, 0.0, kSeed);
  std::string detail = "KS";
  for (const auto& r : report.rows) detail += fmt(" %.4f", r.ks);
  return {report.nonincreasing, detail + fmt(" along T = 50, 200, 800 (one rise <= %.4f allowed)", 2.0 / std::sqrt(2000.0))};
}

Outcome criterion7() {
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> normal;
  std::vector<double> z(10'000'000);
  for (auto& x : z) x = normal(rng);
  double worst = 0.0;
  for (double r : {0.25, 1.0})
    for (double x : {-1.0, 0.0, 1.0, 2.0}) {
      const double shift = std::sqrt(2.0 * r);
      long double sum = 0.0L;
      for (double n : z) sum += std::exp(-std::exp(-x - r + shift * n));
      worst = std::max(worst, std::abs(limit_cdf(x, r) - static_cast<double>(sum / z.size())));
    }
  double gumbel = 0.0;
  for (double x = -5.0; x <= 10.0; x += 0.01)
    gumbel = std::max(gumbel, std::abs(limit_cdf(x, 0.0) - std::exp(-std::exp(-x))));
  return {worst < 5e-4 && gumbel < 1e-12,
          fmt("max |G - MC| = %.3g (limit 5e-4); max |G(x,0) - Gumbel| = %.3g (limit 1e-12)", worst, gumbel)};
}

// Sample covariances E[X_0 X_k] (stationary) or E[X_i X_j] (increment inputs) against targets.
struct CovCheck {
  double worst_z = 0.0;
  bool ok = true;
};

CovCheck check_covariances(const std::function<Path(std::uint64_t)>& sim, std::size_t i0,
                           const std::vector<std::size_t>& lags, const std::function<double(std::size_t, std::size_t)>& target,
                           std::uint64_t seed) {
  const std::size_t n = 10000;
  std::vector<double> sum(lags.size()), sum2(lags.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = sim(derive_seed(seed, k));
    for (std::size_t l = 0; l < lags.size(); ++l) {
      const double prod = p.values[i0] * p.values[i0 + lags[l]];
      sum[l] += prod;
      sum2[l] += prod * prod;
    }
  }
  CovCheck out;
  for (std::size_t l = 0; l < lags.size(); ++l) {
    const double mean = sum[l] / n, var = (sum2[l] / n - mean * mean) * n / (n - 1.0);
    const double z = std::abs(mean - target(i0, i0 + lags[l])) / std::sqrt(var / n);
    out.worst_z = std::max(out.worst_z, z);
    out.ok = out.ok && z <= 3.0;
  }
  return out;
}

Outcome criterion8() {
  const std::vector<std::size_t> lags{1, 2, 4, 8, 16};
  const std::size_t len = 256;
  const auto increment_target = [](const IncrementVariance& v, double dt) {
    return [v, dt](std::size_t i, std::size_t j) {
      const double s = i * dt, t = j * dt;
      return 0.5 * (v(s) + v(t) - v(t - s));
    };
  };

  const auto fou = StationaryCovariance::fractional_ou(1.0);
  const auto stat = check_covariances([&](std::uint64_t s) { return simulate_stationary(fou, len, 0.1, s); }, 0, lags,
                                      [&](std::size_t i, std::size_t j) { return fou((j - i) * 0.1); }, kSeed);

  const double dt = 1.0 / 64.0;
  const auto fbm =
      check_covariances([&](std::uint64_t s) { return simulate_fbm(0.7, len, dt, s); }, 16, lags,
                        increment_target(IncrementVariance::fbm(0.7), dt), kSeed + 1);

  const std::vector<double> w{0.6, 0.8}, h{0.5, 0.7};
  const auto mixed =
      check_covariances([&](std::uint64_t s) { return simulate_mixed_fbm(w, h, len, dt, s); }, 16, lags,
                        increment_target(IncrementVariance::mixed_fbm(w, h), dt), kSeed + 2);

  const auto integ = check_covariances([&](std::uint64_t s) { return simulate_integrated(fou, len, 0.05, s); }, 16,
                                       lags, increment_target(IncrementVariance::integrated(fou), 0.05), kSeed + 3);

  return {stat.ok && fbm.ok && mixed.ok && integ.ok,
          fmt("max z over 5 lags: stationary %.2f, fbm %.2f, mixed %.2f, integrated %.2f (limit 3)", stat.worst_z,
              fbm.worst_z, mixed.worst_z, integ.worst_z)};
}

Outcome criterion9() {
  const std::string log = (std::filesystem::temp_directory_path() / "shepp_acceptance_unit.txt").string();
  const std::string cmd = std::string(SHEPP_UNIT_TESTS_PATH) + " --no-version --force-colors=0 > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  // doctest reports a failing may_fail case as passed; its assertion failures
  // still appear in the log under a "TEST CASE:" heading.
  std::string summary;
  std::set<std::string> failing;
  if (FILE* f = std::fopen(log.c_str(), "r")) {
    char buf[1024];
    while (std::fgets(buf, sizeof buf, f)) {
      std::string line(buf);
      while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
      if (line.find("test cases:") != std::string::npos) summary = line;
      if (line.rfind("TEST CASE:", 0) == 0) failing.insert(line.substr(line.find_first_not_of(' ', 10)));
    }
    std::fclose(f);
  }
  const bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
  std::string detail = summary.empty() ? std::string("no summary") : summary.substr(summary.find("test cases:"));
  detail += fmt("; %zu case(s) with failed assertions", failing.size());
  if (ok && !failing.empty()) detail += ", all marked may_fail (invariants that do not hold as stated):";
  for (const auto& name : failing) detail += " [" + name + "]";
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"analytic identity for fBm", criterion1},
      {"analytic identity for integrated inputs", criterion2},
      {"Pickands anchors", criterion3},
      {"oracle equivalence", criterion4},
      {"tail-ratio stabilization", criterion5},
      {"limit-law trend", criterion6},
      {"limit-CDF quadrature", criterion7},
      {"simulation fidelity", criterion8},
      {"invariant suite", criterion9}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s  %s: %s [%.1f s]\n", id, out.pass ? "PASS" : "FAIL", criteria[i].first,
                out.detail.c_str(), secs);
    failures += !out.pass;
  }
  return failures == 0 ? 0 : 1;
}
