#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>

#include "shepp/cli.hpp"
#include "shepp/errors.hpp"
#include "shepp/experiments.hpp"
#include "shepp/persist.hpp"

namespace shepp {

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string full(double v) { return fmt(v, 15); }

const char* verdict(bool ok) { return ok ? "met" : "NOT met"; }

double resolve_pickands_sq(const RunConfig& c, double alpha) {
  if (c.pickands_sq) return *c.pickands_sq;
  const auto h = known_value(alpha);
  if (!h) throw DomainError("no exact Pickands constant for alpha = " + fmt(alpha));
  return *h * *h;
}

SheppGrid fixed_or_rule_grid(const RunConfig& c, double alpha, double u) {
  if (c.n_tau > 0) return SheppGrid::make(c.a, c.b, c.T, c.n_tau, c.n_s);
  return grid_for_threshold({c.a, c.b, c.T, c.mesh_d}, alpha, u);
}

void run_tail(const RunConfig& c, std::ostream& log, const std::filesystem::path& dir, RunResult& res) {
  const auto ls = local_structure(c.model, c.a, c.b);
  const double hsq = resolve_pickands_sq(c, ls.alpha);
  TailStudy study;
  if (c.n_tau > 0)
    study = tail_ratio_study(c.model, fixed_or_rule_grid(c, ls.alpha, 0.0), c.u_ladder, c.n, hsq, c.seed,
                             c.threads);
  else
    study = tail_ratio_study(c.model, MeshRule{c.a, c.b, c.T, c.mesh_d}, c.u_ladder, c.n, hsq, c.seed,
                             c.threads);
  log << "model            " << model_id(c.model) << "\n"
      << "alpha            " << full(ls.alpha) << "\n"
      << "H_alpha^2        " << full(hsq) << "\n"
      << "tail constant C  " << full(study.asymptote.C) << "\n"
      << "horizon T        " << full(c.T) << "\n\n"
      << "       u        p_hat       stderr         asym        ratio   grid pts\n";
  for (const auto& r : study.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%8.3f %12.5g %12.5g %12.5g %12.5g %10zu\n", r.u, r.p_hat, r.std_error,
                  r.asym, r.ratio, r.grid_points);
    log << line;
  }
  log << "\ntrend: " << study.trend << "\n"
      << "ratio band [" << study.band_lo << ", " << study.band_hi << "] and variation < "
      << 100 * study.max_variation << "%: " << verdict(study.stable) << "\n";
  res.criteria_met = study.stable;
  write_table_csv(to_table(study), dir / "tail.csv");
  res.files.push_back("tail.csv");
}

void run_limitlaw(const RunConfig& c, std::ostream& log, const std::filesystem::path& dir, RunResult& res) {
  const auto ls = local_structure(c.model, c.a, c.b);
  const double hsq = resolve_pickands_sq(c, ls.alpha);
  const auto report = empirical_limit_law(c.model, c.a, c.b, c.T_ladder, c.mesh_d, c.n, hsq, c.r, c.seed,
                                          c.location, c.threads);
  log << "model " << model_id(c.model) << ", r = " << c.r << ", location form "
      << (c.location == LocationForm::Printed ? "printed" : "consistent") << "\n\n"
      << "         T        a_T          b_T      mesh     mean x        KS\n";
  for (const auto& r : report.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%10.4g %10.6f %12.6f %9.5f %10.4f %9.5f\n", r.T, r.norm.a_T, r.norm.b_T,
                  r.mesh, r.mean_x, r.ks);
    log << line;
  }
  log << "\nKS nonincreasing (one rise within 2/sqrt(n) allowed): " << verdict(report.nonincreasing) << "\n";
  res.criteria_met = report.nonincreasing;
  write_table_csv(to_table(report), dir / "limitlaw.csv");
  res.files.push_back("limitlaw.csv");
}

void run_pickands(const RunConfig& c, std::ostream& log, const std::filesystem::path& dir, RunResult& res) {
  const double lambda = c.pk_lambda > 0.0 ? c.pk_lambda : default_lambda(c.pk_alpha);
  const auto ests = pickands_ladder(c.pk_alpha, lambda, c.pk_eta, c.pk_strides, c.n, c.seed, c.pk_method,
                                    c.threads);
  const auto anchor = known_value(c.pk_alpha);
  log << "alpha " << c.pk_alpha << ", lambda " << lambda << ", eta " << c.pk_eta << ", method "
      << to_string(c.pk_method) << ", n " << c.n << "\n";
  if (anchor) log << "exact H_alpha    " << full(*anchor) << "\n";
  log << "\n         d        estimate          stderr\n";
  for (const auto& e : ests) {
    char line[128];
    std::snprintf(line, sizeof line, "%10.6g %15.10f %15.10f\n", e.d, e.estimate, e.std_error);
    log << line;
  }
  if (anchor && (c.pk_alpha == 1.0 || c.pk_alpha == 2.0)) {
    const double lo = c.pk_alpha == 1.0 ? 0.85 : 0.50, hi = c.pk_alpha == 1.0 ? 1.05 : 0.60;
    const bool ok = ests.front().estimate >= lo && ests.front().estimate <= hi;
    log << "\nfinest estimate in [" << lo << ", " << hi << "]: " << verdict(ok) << "\n";
    res.criteria_met = ok;
  }
  Table t{{"alpha", "d", "lambda", "eta", "n", "estimate", "stderr", "seed"}, {}};
  for (const auto& e : ests)
    t.rows.push_back({e.alpha, e.d, e.lambda, e.eta, static_cast<double>(e.n), e.estimate, e.std_error,
                      static_cast<double>(e.seed)});
  write_table_csv(t, dir / "pickands.csv");
  res.files.push_back("pickands.csv");
  if (!c.ledger.empty()) append_pickands_ledger(c.ledger, ests);
}

void run_check(const RunConfig& c, std::ostream& log, const std::filesystem::path& dir, RunResult& res) {
  const auto ls = local_structure(c.model, c.a, c.b);
  const auto grid = SheppGrid::make(c.a, c.b, c.T, 11, 21).points();
  const auto a1 = validate_a1(c.model, grid);
  log << "model                     " << model_id(c.model) << "\n"
      << "declared alpha            " << full(ls.alpha) << "\n"
      << "g(a), g(b)                " << full(ls.g(c.a)) << ", " << full(ls.g(c.b)) << "\n";
  if (c.pickands_sq || known_value(ls.alpha))
    log << "tail constant C           " << full(tail_constant(ls, resolve_pickands_sq(c, ls.alpha), c.T).C) << "\n";
  log << "A1 max |Var - 1|          " << fmt(a1.max_standardized_deviation) << "\n"
      << "A1 max scale deviation    " << fmt(a1.max_scale_deviation) << "\n";
  bool ok = a1.max_standardized_deviation < 1e-12 && a1.max_scale_deviation < 1e-8;
  try {
    const auto fit = fit_local_exponent(c.model, c.a, c.b);
    const bool fit_ok = std::abs(fit.alpha_hat - ls.alpha) < 0.02;
    log << "fitted alpha              " << full(fit.alpha_hat) << " (" << verdict(fit_ok) << " within 0.02)\n"
        << "fitted g(tau_ref)         " << full(fit.coeff_hat) << " vs g = " << full(ls.g(fit.tau_ref)) << "\n";
    ok = ok && fit_ok;
  } catch (const FitFailure& e) {
    log << "exponent fit failed: " << e.what() << "\n";
    ok = false;
  }
  const auto berman = berman_coefficient(c.model, c.a, c.b, c.berman_v);
  log << "\n         v        delta(v)     delta(v) ln v\n";
  Table t{{"v", "delta", "product"}, {}};
  for (const auto& p : berman) {
    char line[128];
    std::snprintf(line, sizeof line, "%10.5g %15.6g %15.6g\n", p.v, p.delta, p.product);
    log << line;
    t.rows.push_back({p.v, p.delta, p.product});
  }
  res.criteria_met = ok;
  write_table_csv(t, dir / "berman.csv");
  res.files.push_back("berman.csv");
}

void run_oracle(const RunConfig& c, std::ostream& log, const std::filesystem::path& dir, RunResult& res) {
  const auto grid = SheppGrid::make(c.a, c.b, c.T, c.oracle_n_tau, c.oracle_n_s);
  const auto rows = oracle_compare(c.model, grid, c.oracle_u, c.n, c.seed, 3.0, c.threads);
  log << "model " << model_id(c.model) << " on a " << c.oracle_n_tau << " x " << c.oracle_n_s << " grid\n\n"
      << "       u   p_pipeline    p_oracle        z\n";
  bool ok = true;
  for (const auto& r : rows) {
    char line[128];
    std::snprintf(line, sizeof line, "%8.3f %12.5f %11.5f %8.3f\n", r.u, r.pipeline.p_hat, r.oracle.p_hat, r.z);
    log << line;
    ok = ok && r.agree;
  }
  log << "\nagreement within 3 combined stderr: " << verdict(ok) << "\n";
  res.criteria_met = ok;
  write_table_csv(to_table(rows), dir / "oracle.csv");
  res.files.push_back("oracle.csv");
}

void run_convergence(const RunConfig& c, std::ostream& log, const std::filesystem::path& dir,
                     RunResult& res) {
  const auto study = convergence_study(c.model, c.a, c.b, c.T, c.d_ladder, c.conv_u, c.n, c.seed, c.threads);
  log << "model " << model_id(c.model) << ", u = " << c.conv_u << "\n\n"
      << "         d        mesh      points        p_hat       stderr\n";
  for (const auto& r : study.rows) {
    char line[128];
    std::snprintf(line, sizeof line, "%10.5g %11.6f %11zu %12.6f %12.6f\n", r.d, r.mesh, r.grid_points, r.p_hat,
                  r.std_error);
    log << line;
  }
  log << "\nstabilized (two finest levels within 2 stderr): " << verdict(study.stabilized) << "\n";
  res.criteria_met = study.stabilized;
  write_table_csv(to_table(study), dir / "convergence.csv");
  res.files.push_back("convergence.csv");
}

}  // namespace

RunResult run(const RunConfig& config, std::ostream& log) {
  const std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  RunResult res;
  switch (config.kind) {
    case ExperimentKind::Tail: run_tail(config, log, dir, res); break;
    case ExperimentKind::LimitLaw: run_limitlaw(config, log, dir, res); break;
    case ExperimentKind::Pickands: run_pickands(config, log, dir, res); break;
    case ExperimentKind::CheckModel: run_check(config, log, dir, res); break;
    case ExperimentKind::OracleCompare: run_oracle(config, log, dir, res); break;
    case ExperimentKind::Convergence: run_convergence(config, log, dir, res); break;
  }
  write_manifest(dir / "manifest.json", to_string(config.kind), config.to_json(), config.seed, res.files);
  res.files.push_back("manifest.json");
  return res;
}

}  // namespace shepp
