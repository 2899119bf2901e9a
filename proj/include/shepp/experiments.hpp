#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shepp/asymptotics.hpp"
#include "shepp/fieldsim.hpp"
#include "shepp/mc.hpp"
#include "shepp/models.hpp"
#include "shepp/persist.hpp"

namespace shepp {

/// Grid maxima of n independent fields; entry k comes from derive_seed(seed, k),
/// so the result does not depend on `threads` (0 = resolve_threads default).
std::vector<double> simulate_maxima(const FieldModel& model, const SheppGrid& grid, std::size_t n,
                                    std::uint64_t seed, unsigned threads = 0);

/// Maxima of the same n fields over nested sub-grids that keep every c-th tau
/// and s point, one column per coarsening factor in `coarsen`.
std::vector<std::vector<double>> simulate_nested_maxima(const FieldModel& model,
                                                        const SheppGrid& grid,
                                                        std::span<const std::size_t> coarsen,
                                                        std::size_t n, std::uint64_t seed,
                                                        unsigned threads = 0);

std::size_t count_exceedances(std::span<const double> maxima, double u);

/// Fraction of n simulated fields whose grid maximum exceeds u. Requires n >= 1000.
McEstimate estimate_tail_mc(const FieldModel& model, const SheppGrid& grid, double u, std::size_t n,
                            std::uint64_t seed, unsigned threads = 0);

/// Mesh rule tying the grid to the threshold: spacing d * u^(-2/alpha) in both axes.
struct MeshRule {
  double a = 0.5;
  double b = 1.0;
  double T = 10.0;
  double d = 0.25;
};

SheppGrid grid_for_threshold(const MeshRule& rule, double alpha, double u);

struct TailRow {
  double u = 0.0;
  double p_hat = 0.0;
  double std_error = 0.0;
  double asym = 0.0;
  double ratio = 0.0;  ///< p_hat / asym (NaN when p_hat = 0)
  double mesh = 0.0;
  std::size_t grid_points = 0;
};

struct TailStudy {
  TailAsymptote asymptote;
  std::vector<TailRow> rows;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  /// (max ratio - min ratio) / min ratio over rows with p_hat > 0.
  double ratio_variation = 0.0;
  /// Whether every ratio lies in [band_lo, band_hi] and variation < max_variation.
  bool stable = false;
  double band_lo = 0.4, band_hi = 1.6, max_variation = 0.3;
  std::string trend;  ///< one-line human summary
};

Table to_table(const TailStudy& study);  // columns u,p_hat,stderr,asym,ratio

/// Tail ratios on one fixed grid for every threshold.
TailStudy tail_ratio_study(const FieldModel& model, const SheppGrid& grid,
                           std::span<const double> u_ladder, std::size_t n, double pickands_sq,
                           std::uint64_t seed, unsigned threads = 0);

/// Tail ratios with a fresh grid per threshold from `rule`. Threshold i uses
/// derive_seed(seed, i) as its run seed.
TailStudy tail_ratio_study(const FieldModel& model, const MeshRule& rule,
                           std::span<const double> u_ladder, std::size_t n, double pickands_sq,
                           std::uint64_t seed, unsigned threads = 0);

struct LimitLawRow {
  double T = 0.0;
  double ks = 0.0;
  std::size_t n = 0;
  Normalizers norm;
  double mesh = 0.0;
  double mean_x = 0.0;  ///< sample mean of a_T (M - b_T)
};

struct LimitLawReport {
  std::vector<LimitLawRow> rows;
  double r = 0.0;
  LocationForm form = LocationForm::Consistent;
  /// KS nonincreasing along the ladder, allowing one rise of at most 2/sqrt(n).
  bool nonincreasing = false;
};

Table to_table(const LimitLawReport& report);  // columns T,ks,n

/// One-sample Kolmogorov-Smirnov distance of `sample` to a continuous CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

/// For each horizon T: simulate n maxima on [a, b] x [0, T] with mesh
/// mesh_d * b_T^(-2/alpha), map to a_T (M - b_T), and take the KS distance to
/// limit_cdf(., r). Horizon i uses derive_seed(seed, i).
LimitLawReport empirical_limit_law(const FieldModel& model, double a, double b,
                                   std::span<const double> T_ladder, double mesh_d,
                                   std::size_t n_per_T, double pickands_sq, double r,
                                   std::uint64_t seed,
                                   LocationForm form = LocationForm::Consistent,
                                   unsigned threads = 0);

struct ConvergenceRow {
  double d = 0.0;
  double mesh = 0.0;
  std::size_t coarsen = 1;
  std::size_t grid_points = 0;
  double p_hat = 0.0;
  double std_error = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;  ///< in ladder order (decreasing d)
  double u = 0.0;
  /// |p(finest) - p(second finest)| < 2 * stderr(finest).
  bool stabilized = false;
};

Table to_table(const ConvergenceStudy& study);  // columns d,mesh,p_hat,stderr

/// p_hat(d) for spacing d * u^(-2/alpha), all levels evaluated on the same
/// fields (nested sub-grids of the finest level). d_ladder must be strictly
/// decreasing with d_0 / d_k integral.
ConvergenceStudy convergence_study(const FieldModel& model, double a, double b, double T,
                                   std::span<const double> d_ladder, double u, std::size_t n,
                                   std::uint64_t seed, unsigned threads = 0);

struct OracleRow {
  double u = 0.0;
  McEstimate pipeline;
  McEstimate oracle;
  double z = 0.0;  ///< |p1 - p2| / combined stderr
  bool agree = false;
};

/// Pipeline (FFT) and dense-Cholesky estimates on the same small grid; the
/// two use unrelated seed streams. agree means within k combined stderr.
std::vector<OracleRow> oracle_compare(const FieldModel& model, const SheppGrid& grid,
                                      std::span<const double> u_list, std::size_t n,
                                      std::uint64_t seed, double k = 3.0, unsigned threads = 0);

Table to_table(std::span<const OracleRow> rows);  // columns u,p_pipeline,se_pipeline,p_oracle,se_oracle,z

}  // namespace shepp
