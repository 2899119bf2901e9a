#include "shepp/fieldsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <variant>

#include <Eigen/Cholesky>

#include "shepp/errors.hpp"

namespace shepp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Returns k if x is within 1e-9 (relative) of the nonnegative integer k, else -1.
long long as_integer(double x) {
  const double k = std::round(x);
  if (k < 0 || std::abs(x - k) > 1e-9 * std::max(1.0, std::abs(x))) return -1;
  return static_cast<long long>(k);
}

void require_grid_args(double a, double b, double T, std::size_t n_tau, std::size_t n_s) {
  if (!(a > 0.0) || !(b > a)) throw DomainError("grid requires 0 < a < b");
  if (!(T > 0.0)) throw DomainError("grid requires T > 0");
  if (n_tau < 2 || n_s < 2) throw DomainError("grid requires n_tau >= 2 and n_s >= 2");
}

std::vector<double> fgn_autocovariance(double hurst, double dt, std::size_t n) {
  const double h2 = 2.0 * hurst;
  const double scale = 0.5 * std::pow(dt, h2);
  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kd = static_cast<double>(k);
    c[k] = scale * (std::pow(kd + 1.0, h2) - 2.0 * std::pow(kd, h2) + std::pow(std::abs(kd - 1.0), h2));
  }
  return c;
}

std::shared_ptr<const CirculantSampler> stationary_sampler(const StationaryCovariance& cov,
                                                           std::size_t n, double dt) {
  return std::make_shared<const CirculantSampler>(
      [&cov, dt](std::size_t k) { return cov(static_cast<double>(k) * dt); }, n);
}

std::shared_ptr<const CirculantSampler> fgn_sampler(double hurst, std::size_t n, double dt) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("Hurst index must lie in (0, 1)");
  // Autocovariance is needed up to the largest padded embedding size.
  std::size_t p = 1;
  while (p < 2 * n) p <<= 1;
  auto c = std::make_shared<std::vector<double>>(fgn_autocovariance(hurst, dt, 2 * p + 1));
  return std::make_shared<const CirculantSampler>([c](std::size_t k) { return (*c)[k]; }, n);
}

}  // namespace

// ---------------------------------------------------------------- SheppGrid

SheppGrid SheppGrid::make(double a, double b, double T, std::size_t n_tau, std::size_t n_s) {
  require_grid_args(a, b, T, n_tau, n_s);
  const double dtau = (b - a) / static_cast<double>(n_tau - 1);
  const double ds = T / static_cast<double>(n_s - 1);
  const double base = std::min(dtau, ds);
  for (int k = 1; k <= 100000; ++k) {
    const double h = base / k;
    if (as_integer(dtau / h) > 0 && as_integer(ds / h) > 0 && as_integer(b / h) > 0)
      return make(a, b, T, n_tau, n_s, h);
  }
  std::ostringstream msg;
  msg << "no common path step for dtau = " << dtau << ", ds = " << ds << ", b = " << b;
  throw IncommensurateGrid(msg.str());
}

SheppGrid SheppGrid::make(double a, double b, double T, std::size_t n_tau, std::size_t n_s,
                          double path_step) {
  require_grid_args(a, b, T, n_tau, n_s);
  if (!(path_step > 0.0)) throw DomainError("path step must be positive");
  const double dtau = (b - a) / static_cast<double>(n_tau - 1);
  const double ds = T / static_cast<double>(n_s - 1);
  const long long st = as_integer(dtau / path_step);
  const long long ss = as_integer(ds / path_step);
  const long long bi = as_integer(b / path_step);
  if (st <= 0 || ss <= 0 || bi <= 0) {
    std::ostringstream msg;
    msg << "path step " << path_step << " does not divide dtau = " << dtau << ", ds = " << ds
        << " and b = " << b;
    throw IncommensurateGrid(msg.str());
  }
  SheppGrid g;
  g.a_ = a;
  g.b_ = b;
  g.T_ = T;
  g.path_step_ = path_step;
  g.n_tau_ = n_tau;
  g.n_s_ = n_s;
  g.stride_tau_ = static_cast<std::size_t>(st);
  g.stride_s_ = static_cast<std::size_t>(ss);
  g.b_index_ = static_cast<std::size_t>(bi);
  return g;
}

SheppGrid SheppGrid::with_mesh(double a, double b, double T, double q) {
  if (!(q > 0.0)) throw DomainError("mesh must be positive");
  const auto start = static_cast<long long>(std::ceil(1.0 / q - 1e-9));
  for (long long N = std::max(1LL, start); N <= start + 1000000; ++N) {
    const double nd = static_cast<double>(N);
    const long long ai = as_integer(a * nd), bi = as_integer(b * nd), ti = as_integer(T * nd);
    if (ai < 0 || bi <= ai || ti <= 0) continue;
    return make(a, b, T, static_cast<std::size_t>(bi - ai + 1), static_cast<std::size_t>(ti + 1),
                1.0 / nd);
  }
  throw IncommensurateGrid("no mesh 1/N <= q makes a, b and T grid points");
}

std::vector<FieldPoint> SheppGrid::points() const {
  std::vector<FieldPoint> pts;
  pts.reserve(size());
  for (std::size_t j = 0; j < n_tau_; ++j)
    for (std::size_t l = 0; l < n_s_; ++l) pts.push_back({tau(j), s(l)});
  return pts;
}

// ----------------------------------------------------------- path samplers

PathSimulator::PathSimulator(const FieldModel& model, std::size_t n, double dt, unsigned subgrid)
    : n_(n), dt_(dt) {
  if (n < 2) throw DomainError("path needs at least 2 points");
  if (!(dt > 0.0)) throw DomainError("path spacing must be positive");
  std::visit(Overloaded{
                 [&](const StationaryCovariance& c) {
                   kind_ = Kind::Stationary;
                   samplers_.push_back(stationary_sampler(c, n, dt));
                 },
                 [&](const Example21Field& f) {
                   kind_ = Kind::Stationary;
                   samplers_.push_back(stationary_sampler(f.covariance, n, dt));
                 },
                 [&](const IncrementVariance& v) {
                   if (v.family() == VarianceFamily::Integrated) {
                     if (subgrid < 1) throw DomainError("integrated sub-grid factor must be >= 1");
                     kind_ = Kind::Integrated;
                     subgrid_ = subgrid;
                     const std::size_t fine = (n - 1) * subgrid + 1;
                     samplers_.push_back(stationary_sampler(v.zeta(), fine, dt / subgrid));
                   } else {
                     kind_ = Kind::Fbm;
                     for (std::size_t i = 0; i < v.hursts().size(); ++i) {
                       samplers_.push_back(fgn_sampler(v.hursts()[i], n - 1, dt));
                       weights_.push_back(v.family() == VarianceFamily::Fbm ? 1.0 : v.weights()[i]);
                     }
                   }
                 },
             },
             model);
}

PathSimulator::Scratch PathSimulator::make_scratch() const {
  Scratch s;
  for (const auto& sampler : samplers_) s.ws.push_back(sampler->make_workspace());
  if (kind_ == Kind::Fbm) s.buffer.resize(n_ - 1);
  if (kind_ == Kind::Integrated) s.buffer.resize(samplers_.front()->size());
  return s;
}

bool PathSimulator::cholesky_fallback() const {
  return std::any_of(samplers_.begin(), samplers_.end(),
                     [](const auto& s) { return s->used_cholesky(); });
}

void PathSimulator::generate(std::uint64_t seed, std::span<double> out, Scratch& scratch) const {
  if (out.size() < n_) throw DomainError("output span shorter than path");
  switch (kind_) {
    case Kind::Stationary: {
      Rng rng(seed);
      samplers_.front()->sample(rng, out, scratch.ws.front());
      return;
    }
    case Kind::Fbm: {
      std::fill_n(out.begin(), n_, 0.0);
      for (std::size_t i = 0; i < samplers_.size(); ++i) {
        Rng rng(i == 0 ? seed : derive_seed(seed, i));
        samplers_[i]->sample(rng, scratch.buffer, scratch.ws[i]);
        double acc = 0.0;
        const double w = weights_[i];
        for (std::size_t k = 1; k < n_; ++k) {
          acc += scratch.buffer[k - 1];
          out[k] += w * acc;
        }
      }
      return;
    }
    case Kind::Integrated: {
      Rng rng(seed);
      samplers_.front()->sample(rng, scratch.buffer, scratch.ws.front());
      const double h = dt_ / subgrid_;
      const auto& z = scratch.buffer;
      double acc = 0.0;
      out[0] = 0.0;
      for (std::size_t k = 1; k < n_; ++k) {
        for (std::size_t i = (k - 1) * subgrid_; i < k * subgrid_; ++i) acc += 0.5 * h * (z[i] + z[i + 1]);
        out[k] = acc;
      }
      return;
    }
  }
}

namespace {

Path run_path(const FieldModel& model, std::size_t n, double dt, std::uint64_t seed,
              unsigned subgrid = 8) {
  PathSimulator sim(model, n, dt, subgrid);
  auto scratch = sim.make_scratch();
  Path p;
  p.values.resize(n);
  p.dt = dt;
  sim.generate(seed, p.values, scratch);
  p.cholesky_fallback = sim.cholesky_fallback();
  return p;
}

}  // namespace

Path simulate_stationary(const StationaryCovariance& model, std::size_t n, double dt,
                         std::uint64_t seed) {
  return run_path(model, n, dt, seed);
}

Path simulate_fbm(double hurst, std::size_t n, double dt, std::uint64_t seed) {
  return run_path(IncrementVariance::fbm(hurst), n, dt, seed);
}

Path simulate_mixed_fbm(std::span<const double> weights, std::span<const double> hursts,
                        std::size_t n, double dt, std::uint64_t seed) {
  return run_path(IncrementVariance::mixed_fbm({weights.begin(), weights.end()},
                                               {hursts.begin(), hursts.end()}),
                  n, dt, seed);
}

Path simulate_integrated(const StationaryCovariance& zeta, std::size_t n, double dt,
                         std::uint64_t seed, unsigned subgrid) {
  return run_path(IncrementVariance::integrated(zeta), n, dt, seed, subgrid);
}

// ------------------------------------------------------------ field builds

FieldSample build_shepp_field(const Path& path, const SheppGrid& grid, const FieldModel& model) {
  if (std::holds_alternative<Example21Field>(model))
    throw DomainError("two-path fields are built by build_example21_field");
  if (!(path.dt > 0.0)) throw IncommensurateGrid("path spacing must be positive");
  const long long ratio = as_integer(grid.path_step() / path.dt);
  if (ratio <= 0) {
    std::ostringstream msg;
    msg << "path spacing " << path.dt << " does not divide the grid path step " << grid.path_step();
    throw IncommensurateGrid(msg.str());
  }
  const auto r = static_cast<std::size_t>(ratio);
  if (path.values.size() < (grid.path_points() - 1) * r + 1)
    throw IncommensurateGrid("path does not cover [0, T + b]");

  FieldSample out;
  out.grid = grid;
  out.model_id = model_id(model);
  out.values.resize(static_cast<Eigen::Index>(grid.n_tau()), static_cast<Eigen::Index>(grid.n_s()));
  for (std::size_t j = 0; j < grid.n_tau(); ++j) {
    const double inv = 1.0 / field_scale(model, grid.tau(j));
    const std::size_t ti = grid.tau_index(j) * r;
    for (std::size_t l = 0; l < grid.n_s(); ++l) {
      const std::size_t si = l * grid.stride_s() * r;
      out.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) =
          (path.values[si + ti] - path.values[si]) * inv;
    }
  }
  return out;
}

FieldSample build_example21_field(const StationaryCovariance& cov,
                                  const std::function<double(double)>& sigma,
                                  const SheppGrid& grid, std::uint64_t seed) {
  FieldSimulator sim(Example21Field{cov, sigma}, grid);
  return sim.sample(seed);
}

double field_max(const FieldSample& sample) {
  if (sample.values.size() == 0) return -std::numeric_limits<double>::infinity();
  return sample.values.maxCoeff();
}

// ---------------------------------------------------------- FieldSimulator

FieldSimulator::FieldSimulator(FieldModel model, SheppGrid grid, unsigned integrated_subgrid)
    : model_(std::move(model)), grid_(grid) {
  if (grid_.size() == 0) throw DomainError("field simulator needs a non-empty grid");
  two_paths_ = std::holds_alternative<Example21Field>(model_);
  inv_scale_.resize(grid_.n_tau());
  for (std::size_t j = 0; j < grid_.n_tau(); ++j) {
    const double sd = two_paths_ ? std::numbers::sqrt2 : field_scale(model_, grid_.tau(j));
    if (!(sd > 0.0))
      throw DegenerateVariance("field variance vanishes at tau = " + std::to_string(grid_.tau(j)));
    inv_scale_[j] = 1.0 / sd;
  }
  path_ = std::make_shared<const PathSimulator>(model_, grid_.path_points(), grid_.path_step(),
                                                integrated_subgrid);
}

FieldSimulator::Scratch FieldSimulator::make_scratch() const {
  Scratch s;
  s.path_scratch = path_->make_scratch();
  s.x.resize(path_->size());
  if (two_paths_) s.y.resize(path_->size());
  return s;
}

void FieldSimulator::draw(std::uint64_t seed, Scratch& scratch) const {
  if (two_paths_) {
    path_->generate(derive_seed(seed, 0), scratch.x, scratch.path_scratch);
    path_->generate(derive_seed(seed, 1), scratch.y, scratch.path_scratch);
  } else {
    path_->generate(seed, scratch.x, scratch.path_scratch);
  }
}

double FieldSimulator::current_max(const Scratch& scratch, std::size_t coarsen) const {
  if (coarsen < 1) throw DomainError("coarsening factor must be >= 1");
  const double* x = scratch.x.data();
  const std::size_t ss = grid_.stride_s() * coarsen;
  const std::size_t n_s = (grid_.n_s() - 1) / coarsen + 1;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid_.n_tau(); j += coarsen) {
    const std::size_t ti = grid_.tau_index(j);
    double m = -std::numeric_limits<double>::infinity();
    if (two_paths_) {
      const double* y = scratch.y.data() + ti;
      for (std::size_t l = 0, si = 0; l < n_s; ++l, si += ss) m = std::max(m, y[si] + x[si]);
    } else {
      const double* xt = x + ti;
      for (std::size_t l = 0, si = 0; l < n_s; ++l, si += ss) m = std::max(m, xt[si] - x[si]);
    }
    best = std::max(best, m * inv_scale_[j]);
  }
  return best;
}

double FieldSimulator::sample_max(std::uint64_t seed, Scratch& scratch) const {
  draw(seed, scratch);
  return current_max(scratch);
}

FieldSample FieldSimulator::sample(std::uint64_t seed) const {
  auto scratch = make_scratch();
  draw(seed, scratch);
  FieldSample out;
  out.grid = grid_;
  out.seed = seed;
  out.model_id = model_id(model_);
  out.values.resize(static_cast<Eigen::Index>(grid_.n_tau()), static_cast<Eigen::Index>(grid_.n_s()));
  for (std::size_t j = 0; j < grid_.n_tau(); ++j) {
    const std::size_t ti = grid_.tau_index(j);
    for (std::size_t l = 0; l < grid_.n_s(); ++l) {
      const std::size_t si = l * grid_.stride_s();
      const double v = two_paths_ ? scratch.y[si + ti] + scratch.x[si]
                                  : scratch.x[si + ti] - scratch.x[si];
      out.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = v * inv_scale_[j];
    }
  }
  return out;
}

// ------------------------------------------------------------------ oracle

std::vector<double> oracle_sample_maxima(const FieldModel& model, const SheppGrid& grid,
                                         std::size_t n, std::uint64_t seed) {
  const auto pts = grid.points();
  if (pts.size() > 64) throw DomainError("oracle grid is limited to 64 points");
  const auto d = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd corr(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      corr(i, j) = corr(j, i) = shepp_correlation(model, pts[i], pts[j]);
  corr.diagonal().array() += 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success)
    throw CholeskyFailure("grid correlation matrix is not positive semidefinite after jitter");
  const Eigen::MatrixXd L = llt.matrixL();

  std::vector<double> maxima(n);
  Eigen::VectorXd z(d);
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng(derive_seed(seed, k));
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < d; ++i) z[i] = normal(rng);
    maxima[k] = (L * z).maxCoeff();
  }
  return maxima;
}

McEstimate oracle_sample_max(const FieldModel& model, const SheppGrid& grid, std::size_t n,
                             double u, std::uint64_t seed) {
  const auto maxima = oracle_sample_maxima(model, grid, n, seed);
  const auto hits = static_cast<std::size_t>(
      std::count_if(maxima.begin(), maxima.end(), [u](double m) { return m > u; }));
  return binomial_estimate(hits, n, u, seed);
}

// ------------------------------------------------------------------ export

void write_field_csv(const FieldSample& sample, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  out << "tau,s,value\n";
  char line[96];
  for (Eigen::Index j = 0; j < sample.values.rows(); ++j)
    for (Eigen::Index l = 0; l < sample.values.cols(); ++l) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n",
                    sample.grid.tau(static_cast<std::size_t>(j)),
                    sample.grid.s(static_cast<std::size_t>(l)), sample.values(j, l));
      out << line;
    }
  if (!out) throw IoError("write failed for " + file.string());
}

namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("truncated field file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char kMagic[4] = {'S', 'H', 'P', 'F'};

}  // namespace

void write_field_binary(const FieldSample& sample, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  const auto& g = sample.grid;
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, 1);
  put_le<std::uint64_t>(out, g.n_tau());
  put_le<std::uint64_t>(out, g.n_s());
  put_le<double>(out, g.a());
  put_le<double>(out, g.b());
  put_le<double>(out, g.horizon());
  put_le<double>(out, g.path_step());
  put_le<std::uint64_t>(out, sample.seed);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sample.model_id.size()));
  out.write(sample.model_id.data(), static_cast<std::streamsize>(sample.model_id.size()));
  for (Eigen::Index j = 0; j < sample.values.rows(); ++j)
    for (Eigen::Index l = 0; l < sample.values.cols(); ++l) put_le<double>(out, sample.values(j, l));
  if (!out) throw IoError("write failed for " + file.string());
}

FieldSample read_field_binary(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(file.string() + " is not a field dump");
  if (get_le<std::uint32_t>(in) != 1) throw IoError("unsupported field dump version");
  const auto n_tau = get_le<std::uint64_t>(in);
  const auto n_s = get_le<std::uint64_t>(in);
  const double a = get_le<double>(in);
  const double b = get_le<double>(in);
  const double T = get_le<double>(in);
  const double step = get_le<double>(in);
  FieldSample out;
  out.seed = get_le<std::uint64_t>(in);
  out.model_id.resize(get_le<std::uint32_t>(in));
  if (!in.read(out.model_id.data(), static_cast<std::streamsize>(out.model_id.size())))
    throw IoError("truncated field file");
  out.grid = SheppGrid::make(a, b, T, n_tau, n_s, step);
  out.values.resize(static_cast<Eigen::Index>(n_tau), static_cast<Eigen::Index>(n_s));
  for (Eigen::Index j = 0; j < out.values.rows(); ++j)
    for (Eigen::Index l = 0; l < out.values.cols(); ++l) out.values(j, l) = get_le<double>(in);
  return out;
}

}  // namespace shepp
