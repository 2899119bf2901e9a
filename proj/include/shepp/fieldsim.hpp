#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shepp/circulant.hpp"
#include "shepp/mc.hpp"
#include "shepp/models.hpp"

namespace shepp {

/// Rectangular (tau, s) grid over [a, b] x [0, T].
///
/// tau_j = b - j * dtau (j = 0..n_tau-1) and s_l = l * ds (l = 0..n_s-1).
/// Both spacings and b must be integer multiples of path_step, the spacing of
/// the underlying input path on [0, T + b]; this is checked at construction.
class SheppGrid {
 public:
  /// Picks the coarsest path step commensurate with dtau, ds and b.
  static SheppGrid make(double a, double b, double T, std::size_t n_tau, std::size_t n_s);
  static SheppGrid make(double a, double b, double T, std::size_t n_tau, std::size_t n_s,
                        double path_step);
  /// Square mesh no coarser than q: path step 1/N for the smallest N >= 1/q
  /// with a N, b N and T N integral; dtau = ds = path step.
  static SheppGrid with_mesh(double a, double b, double T, double q);

  SheppGrid() = default;  // empty grid, only useful as a placeholder

  double a() const { return a_; }
  double b() const { return b_; }
  double horizon() const { return T_; }
  std::size_t n_tau() const { return n_tau_; }
  std::size_t n_s() const { return n_s_; }
  std::size_t size() const { return n_tau_ * n_s_; }
  double dtau() const { return stride_tau_ * path_step_; }
  double ds() const { return stride_s_ * path_step_; }
  double path_step() const { return path_step_; }
  double tau(std::size_t j) const { return b_ - static_cast<double>(j) * dtau(); }
  double s(std::size_t l) const { return static_cast<double>(l) * ds(); }

  std::size_t stride_tau() const { return stride_tau_; }
  std::size_t stride_s() const { return stride_s_; }
  std::size_t b_index() const { return b_index_; }
  /// Path index of tau_j (window length in path steps).
  std::size_t tau_index(std::size_t j) const { return b_index_ - j * stride_tau_; }
  /// Points needed on the path grid: [0, T + b].
  std::size_t path_points() const { return b_index_ + (n_s_ - 1) * stride_s_ + 1; }

  std::vector<FieldPoint> points() const;

 private:
  double a_ = 0, b_ = 0, T_ = 0, path_step_ = 0;
  std::size_t n_tau_ = 0, n_s_ = 0, stride_tau_ = 1, stride_s_ = 1, b_index_ = 0;
};

/// Standardized field values on a grid: values(j, l) = Z(tau_j, s_l) / sigma(tau_j).
struct FieldSample {
  SheppGrid grid;
  Eigen::MatrixXd values;
  std::uint64_t seed = 0;
  std::string model_id;
};

/// Sampled input path X(k dt), k = 0..n-1.
struct Path {
  std::vector<double> values;
  double dt = 0.0;
  bool cholesky_fallback = false;
};

Path simulate_stationary(const StationaryCovariance& model, std::size_t n, double dt,
                         std::uint64_t seed);
/// Exact fBm via circulant embedding of fractional Gaussian noise; path[0] = 0.
Path simulate_fbm(double hurst, std::size_t n, double dt, std::uint64_t seed);
/// Component 0 draws from `seed`, component i >= 1 from derive_seed(seed, i).
Path simulate_mixed_fbm(std::span<const double> weights, std::span<const double> hursts,
                        std::size_t n, double dt, std::uint64_t seed);
/// Trapezoidal integral of a stationary path sampled on a grid `subgrid` times
/// finer than dt. Discretization bias is O((dt / subgrid)^2).
Path simulate_integrated(const StationaryCovariance& zeta, std::size_t n, double dt,
                         std::uint64_t seed, unsigned subgrid = 8);

/// Reusable exact sampler for the input path of a stationary or
/// stationary-increment model on a fixed grid.
class PathSimulator {
 public:
  PathSimulator(const FieldModel& model, std::size_t n, double dt, unsigned subgrid = 8);

  struct Scratch {
    std::vector<CirculantSampler::Workspace> ws;
    std::vector<double> buffer;
  };
  Scratch make_scratch() const;
  void generate(std::uint64_t seed, std::span<double> out, Scratch& scratch) const;

  std::size_t size() const { return n_; }
  double dt() const { return dt_; }
  bool cholesky_fallback() const;

 private:
  enum class Kind { Stationary, Fbm, Integrated };
  Kind kind_;
  std::size_t n_;
  double dt_;
  unsigned subgrid_ = 1;
  std::vector<double> weights_;
  std::vector<std::shared_ptr<const CirculantSampler>> samplers_;
};

/// values(j, l) = (X(s_l + tau_j) - X(s_l)) / sd(tau_j) for a stationary or
/// stationary-increment model. path.values[k] is X(k dt); the path must cover
/// [0, T + b] with dt dividing the grid's path step, otherwise IncommensurateGrid.
FieldSample build_shepp_field(const Path& path, const SheppGrid& grid, const FieldModel& model);

/// Z(tau, s) / sigma(tau) = (Y(tau + s) + X(s)) / sqrt(2) with X, Y independent.
FieldSample build_example21_field(const StationaryCovariance& cov,
                                  const std::function<double(double)>& sigma,
                                  const SheppGrid& grid, std::uint64_t seed);

double field_max(const FieldSample& sample);

/// Simulates standardized fields of any FieldModel on one grid, replication
/// after replication, without materializing the value matrix unless asked.
class FieldSimulator {
 public:
  FieldSimulator(FieldModel model, SheppGrid grid, unsigned integrated_subgrid = 8);

  struct Scratch {
    PathSimulator::Scratch path_scratch;
    std::vector<double> x;  // input path (X for the two-path field)
    std::vector<double> y;  // second path (two-path field only)
  };
  Scratch make_scratch() const;

  const SheppGrid& grid() const { return grid_; }
  const FieldModel& model() const { return model_; }

  /// Draws the input path(s) for one replication into scratch.
  void draw(std::uint64_t seed, Scratch& scratch) const;
  /// Maximum of the field held in scratch over the sub-grid that keeps every
  /// `coarsen`-th tau and s point (coarsen = 1 is the full grid).
  double current_max(const Scratch& scratch, std::size_t coarsen = 1) const;
  double sample_max(std::uint64_t seed, Scratch& scratch) const;
  FieldSample sample(std::uint64_t seed) const;

 private:
  FieldModel model_;
  SheppGrid grid_;
  bool two_paths_ = false;
  std::vector<double> inv_scale_;  // 1 / sd(tau_j)
  std::shared_ptr<const PathSimulator> path_;
};

/// Independent Monte Carlo oracle: exact correlation matrix of the (<= 64)
/// grid points from shepp_correlation, dense Cholesky, n replications.
/// Returns the n sampled grid maxima; replication k uses derive_seed(seed, k).
std::vector<double> oracle_sample_maxima(const FieldModel& model, const SheppGrid& grid,
                                         std::size_t n, std::uint64_t seed);
McEstimate oracle_sample_max(const FieldModel& model, const SheppGrid& grid, std::size_t n,
                             double u, std::uint64_t seed);

/// Flat CSV export: header "tau,s,value", one row per grid point, %.17g.
void write_field_csv(const FieldSample& sample, const std::filesystem::path& file);

/// Binary dump, little-endian:
///   magic "SHPF" (4 bytes), u32 version = 1, u64 n_tau, u64 n_s,
///   f64 a, f64 b, f64 T, f64 path_step, u64 seed,
///   u32 model_id length, model_id bytes,
///   n_tau * n_s f64 values, row-major (tau index outer).
void write_field_binary(const FieldSample& sample, const std::filesystem::path& file);
FieldSample read_field_binary(const std::filesystem::path& file);

}  // namespace shepp
