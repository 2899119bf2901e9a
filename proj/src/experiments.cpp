#include "shepp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "shepp/errors.hpp"

namespace shepp {

namespace {

constexpr std::uint64_t kOracleStream = 0x6f7261636c65ULL;

unsigned worker_count(unsigned threads, std::size_t n) {
  return std::max(1u, std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(n, 1))));
}

}  // namespace

std::vector<double> simulate_maxima(const FieldModel& model, const SheppGrid& grid, std::size_t n,
                                    std::uint64_t seed, unsigned threads) {
  const FieldSimulator sim(model, grid);
  return parallel_replications<FieldSimulator::Scratch>(
      n, worker_count(threads, n), [&] { return sim.make_scratch(); },
      [&](std::size_t k, FieldSimulator::Scratch& s) { return sim.sample_max(derive_seed(seed, k), s); });
}

std::vector<std::vector<double>> simulate_nested_maxima(const FieldModel& model,
                                                        const SheppGrid& grid,
                                                        std::span<const std::size_t> coarsen,
                                                        std::size_t n, std::uint64_t seed,
                                                        unsigned threads) {
  const FieldSimulator sim(model, grid);
  std::vector<std::vector<double>> out(coarsen.size(), std::vector<double>(n));
  parallel_chunks(n, worker_count(threads, n), [&](unsigned, std::size_t begin, std::size_t end) {
    auto scratch = sim.make_scratch();
    for (std::size_t k = begin; k < end; ++k) {
      sim.draw(derive_seed(seed, k), scratch);
      for (std::size_t c = 0; c < coarsen.size(); ++c) out[c][k] = sim.current_max(scratch, coarsen[c]);
    }
  });
  return out;
}

std::size_t count_exceedances(std::span<const double> maxima, double u) {
  return static_cast<std::size_t>(
      std::count_if(maxima.begin(), maxima.end(), [u](double m) { return m > u; }));
}

McEstimate estimate_tail_mc(const FieldModel& model, const SheppGrid& grid, double u, std::size_t n,
                            std::uint64_t seed, unsigned threads) {
  if (n < 1000) throw DomainError("tail estimation needs n >= 1000");
  const auto maxima = simulate_maxima(model, grid, n, seed, threads);
  return binomial_estimate(count_exceedances(maxima, u), n, u, seed);
}

SheppGrid grid_for_threshold(const MeshRule& rule, double alpha, double u) {
  if (!(u > 0.0)) throw DomainError("threshold must be positive");
  return SheppGrid::with_mesh(rule.a, rule.b, rule.T, rule.d * std::pow(u, -2.0 / alpha));
}

namespace {

void summarize(TailStudy& study) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  bool in_band = !study.rows.empty();
  for (const auto& row : study.rows) {
    if (!(row.p_hat > 0.0)) {
      in_band = false;
      continue;
    }
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    if (row.ratio < study.band_lo || row.ratio > study.band_hi) in_band = false;
  }
  study.ratio_variation = lo < hi ? (hi - lo) / lo : 0.0;
  study.stable = in_band && study.ratio_variation < study.max_variation;
  std::ostringstream msg;
  msg.precision(4);
  if (lo > hi) {
    msg << "no exceedances observed";
  } else {
    msg << "ratios in [" << lo << ", " << hi << "], variation " << 100.0 * study.ratio_variation
        << "%";
    if (study.rows.size() >= 2 && study.rows.back().p_hat > 0.0 && study.rows.front().p_hat > 0.0) {
      const double drift = study.rows.back().ratio - study.rows.front().ratio;
      msg << ", drift " << (drift >= 0 ? "+" : "") << drift << " from first to last u";
    }
  }
  study.trend = msg.str();
}

TailRow make_row(double u, const McEstimate& est, const TailAsymptote& ta, const SheppGrid& grid) {
  TailRow row;
  row.u = u;
  row.p_hat = est.p_hat;
  row.std_error = est.std_error;
  row.asym = tail_probability_asym(ta, u);
  row.ratio = est.p_hat > 0.0 ? est.p_hat / row.asym : std::numeric_limits<double>::quiet_NaN();
  row.mesh = grid.path_step();
  row.grid_points = grid.size();
  return row;
}

void require_increasing(std::span<const double> xs, const char* what) {
  if (xs.empty()) throw DomainError(std::string(what) + " is empty");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw DomainError(std::string(what) + " must be increasing");
}

}  // namespace

Table to_table(const TailStudy& study) {
  Table t{{"u", "p_hat", "stderr", "asym", "ratio"}, {}};
  for (const auto& r : study.rows) t.rows.push_back({r.u, r.p_hat, r.std_error, r.asym, r.ratio});
  return t;
}

TailStudy tail_ratio_study(const FieldModel& model, const SheppGrid& grid,
                           std::span<const double> u_ladder, std::size_t n, double pickands_sq,
                           std::uint64_t seed, unsigned threads) {
  require_increasing(u_ladder, "threshold ladder");
  TailStudy study;
  study.n = n;
  study.seed = seed;
  study.asymptote = tail_constant(local_structure(model, grid.a(), grid.b()), pickands_sq, grid.horizon());
  const auto maxima = simulate_maxima(model, grid, n, seed, threads);
  for (double u : u_ladder)
    study.rows.push_back(make_row(u, binomial_estimate(count_exceedances(maxima, u), n, u, seed),
                                  study.asymptote, grid));
  summarize(study);
  return study;
}

TailStudy tail_ratio_study(const FieldModel& model, const MeshRule& rule,
                           std::span<const double> u_ladder, std::size_t n, double pickands_sq,
                           std::uint64_t seed, unsigned threads) {
  require_increasing(u_ladder, "threshold ladder");
  TailStudy study;
  study.n = n;
  study.seed = seed;
  study.asymptote = tail_constant(local_structure(model, rule.a, rule.b), pickands_sq, rule.T);
  for (std::size_t i = 0; i < u_ladder.size(); ++i) {
    const double u = u_ladder[i];
    const SheppGrid grid = grid_for_threshold(rule, study.asymptote.alpha, u);
    const std::uint64_t run_seed = derive_seed(seed, i);
    const auto maxima = simulate_maxima(model, grid, n, run_seed, threads);
    study.rows.push_back(make_row(
        u, binomial_estimate(count_exceedances(maxima, u), n, u, run_seed), study.asymptote, grid));
  }
  summarize(study);
  return study;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("KS distance of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

Table to_table(const LimitLawReport& report) {
  Table t{{"T", "ks", "n"}, {}};
  for (const auto& r : report.rows) t.rows.push_back({r.T, r.ks, static_cast<double>(r.n)});
  return t;
}

LimitLawReport empirical_limit_law(const FieldModel& model, double a, double b,
                                   std::span<const double> T_ladder, double mesh_d,
                                   std::size_t n_per_T, double pickands_sq, double r,
                                   std::uint64_t seed, LocationForm form, unsigned threads) {
  if (std::holds_alternative<Example21Field>(model))
    throw DomainError("the limit-law experiment needs a stationary or stationary-increment input");
  require_increasing(T_ladder, "horizon ladder");
  if (n_per_T == 0) throw DomainError("limit-law experiment needs n > 0");
  LimitLawReport report;
  report.r = r;
  report.form = form;
  const auto ls = local_structure(model, a, b);
  for (std::size_t i = 0; i < T_ladder.size(); ++i) {
    const double T = T_ladder[i];
    const TailAsymptote ta = tail_constant(ls, pickands_sq, T);
    LimitLawRow row;
    row.T = T;
    row.n = n_per_T;
    row.norm = normalizers(ta, T, r, form);
    const SheppGrid grid =
        SheppGrid::with_mesh(a, b, T, mesh_d * std::pow(row.norm.b_T, -2.0 / ls.alpha));
    row.mesh = grid.path_step();
    auto x = simulate_maxima(model, grid, n_per_T, derive_seed(seed, i), threads);
    for (double& v : x) v = row.norm.a_T * (v - row.norm.b_T);
    row.mean_x = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    row.ks = ks_distance(std::move(x), [r](double v) { return limit_cdf(v, r); });
    report.rows.push_back(row);
  }
  int rises = 0;
  bool ok = true;
  const double slack = 2.0 / std::sqrt(static_cast<double>(n_per_T));
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const double rise = report.rows[i].ks - report.rows[i - 1].ks;
    if (rise > 0.0) {
      ++rises;
      if (rise > slack) ok = false;
    }
  }
  report.nonincreasing = ok && rises <= 1;
  return report;
}

Table to_table(const ConvergenceStudy& study) {
  Table t{{"d", "mesh", "p_hat", "stderr"}, {}};
  for (const auto& r : study.rows) t.rows.push_back({r.d, r.mesh, r.p_hat, r.std_error});
  return t;
}

ConvergenceStudy convergence_study(const FieldModel& model, double a, double b, double T,
                                   std::span<const double> d_ladder, double u, std::size_t n,
                                   std::uint64_t seed, unsigned threads) {
  if (d_ladder.empty()) throw DomainError("convergence study needs a non-empty d ladder");
  for (std::size_t i = 0; i < d_ladder.size(); ++i) {
    if (!(d_ladder[i] > 0.0)) throw DomainError("d ladder entries must be positive");
    if (i > 0 && !(d_ladder[i] < d_ladder[i - 1])) throw DomainError("d ladder must be decreasing");
  }
  if (!(u > 0.0)) throw DomainError("threshold must be positive");
  const double alpha = local_structure(model, a, b).alpha;

  std::vector<std::size_t> refine(d_ladder.size());
  for (std::size_t i = 0; i < d_ladder.size(); ++i) {
    const double q = d_ladder.front() / d_ladder[i];
    const double k = std::round(q);
    if (std::abs(q - k) > 1e-9 * q) throw DomainError("d_0 / d_k must be an integer");
    refine[i] = static_cast<std::size_t>(k);
  }
  const std::size_t finest = refine.back();
  std::vector<std::size_t> coarsen(d_ladder.size());
  for (std::size_t i = 0; i < d_ladder.size(); ++i) {
    if (finest % refine[i] != 0) throw DomainError("d ladder levels must nest");
    coarsen[i] = finest / refine[i];
  }

  const SheppGrid coarse =
      SheppGrid::with_mesh(a, b, T, d_ladder.front() * std::pow(u, -2.0 / alpha));
  const double step = coarse.path_step() / static_cast<double>(finest);
  const SheppGrid grid = SheppGrid::make(a, b, T, (coarse.n_tau() - 1) * finest + 1,
                                         (coarse.n_s() - 1) * finest + 1, step);

  const auto maxima = simulate_nested_maxima(model, grid, coarsen, n, seed, threads);
  ConvergenceStudy study;
  study.u = u;
  for (std::size_t i = 0; i < d_ladder.size(); ++i) {
    const auto est = binomial_estimate(count_exceedances(maxima[i], u), n, u, seed);
    ConvergenceRow row;
    row.d = d_ladder[i];
    row.coarsen = coarsen[i];
    row.mesh = step * static_cast<double>(coarsen[i]);
    row.grid_points = ((grid.n_tau() - 1) / coarsen[i] + 1) * ((grid.n_s() - 1) / coarsen[i] + 1);
    row.p_hat = est.p_hat;
    row.std_error = est.std_error;
    study.rows.push_back(row);
  }
  if (study.rows.size() >= 2) {
    const auto& f = study.rows.back();
    const auto& s = study.rows[study.rows.size() - 2];
    study.stabilized = std::abs(f.p_hat - s.p_hat) < 2.0 * f.std_error;
  }
  return study;
}

std::vector<OracleRow> oracle_compare(const FieldModel& model, const SheppGrid& grid,
                                      std::span<const double> u_list, std::size_t n,
                                      std::uint64_t seed, double k, unsigned threads) {
  const auto pipe = simulate_maxima(model, grid, n, seed, threads);
  const std::uint64_t oracle_seed = derive_seed(seed, kOracleStream);
  const auto orc = oracle_sample_maxima(model, grid, n, oracle_seed);
  std::vector<OracleRow> rows;
  for (double u : u_list) {
    OracleRow row;
    row.u = u;
    row.pipeline = binomial_estimate(count_exceedances(pipe, u), n, u, seed);
    row.oracle = binomial_estimate(count_exceedances(orc, u), n, u, oracle_seed);
    const double se = std::hypot(row.pipeline.std_error, row.oracle.std_error);
    const double diff = std::abs(row.pipeline.p_hat - row.oracle.p_hat);
    row.z = se > 0.0 ? diff / se : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    row.agree = agree_within(row.pipeline, row.oracle, k);
    rows.push_back(row);
  }
  return rows;
}

Table to_table(std::span<const OracleRow> rows) {
  Table t{{"u", "p_pipeline", "se_pipeline", "p_oracle", "se_oracle", "z"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({r.u, r.pipeline.p_hat, r.pipeline.std_error, r.oracle.p_hat,
                      r.oracle.std_error, r.z});
  return t;
}

}  // namespace shepp
