#include "shepp/circulant.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <fftw3.h>

#include "shepp/errors.hpp"

namespace shepp {

namespace {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Eigenvalues of the symmetric circulant whose first row is c(min(j, m - j)).
std::vector<double> circulant_eigenvalues(const std::vector<double>& row) {
  const std::size_t m = row.size();
  std::unique_ptr<double, FftwFree> in(fftw_alloc_real(m));
  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(m / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.get(), out.get(), FFTW_ESTIMATE);
  }
  std::copy(row.begin(), row.end(), in.get());
  fftw_execute(plan);
  std::vector<double> eig(m / 2 + 1);
  for (std::size_t k = 0; k < eig.size(); ++k) eig[k] = out.get()[k][0];
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return eig;
}

}  // namespace

struct CirculantSampler::Plan {
  fftw_plan c2r = nullptr;
  std::vector<double> scale;  // per-frequency standard deviation of the spectral draw
  Eigen::MatrixXd chol;       // lower factor when the embedding route failed
};

struct CirculantSampler::Workspace::Buffers {
  std::unique_ptr<fftw_complex, FftwFree> spectrum;
  std::unique_ptr<double, FftwFree> real;
  Eigen::VectorXd z;
};

CirculantSampler::Workspace::Workspace(Workspace&&) noexcept = default;
CirculantSampler::Workspace& CirculantSampler::Workspace::operator=(Workspace&&) noexcept = default;
CirculantSampler::Workspace::~Workspace() = default;

CirculantSampler::CirculantSampler(const std::function<double(std::size_t)>& autocov,
                                   std::size_t n)
    : n_(n), plan_(std::make_unique<Plan>()) {
  if (n == 0) throw DomainError("circulant sampler needs n >= 1");

  if (n > 1) {
    std::vector<std::size_t> sizes{2 * (n - 1)};
    std::size_t p = 1;
    while (p < sizes.front()) p <<= 1;
    if (p == sizes.front()) p <<= 1;
    sizes.push_back(p);
    sizes.push_back(2 * p);

    for (std::size_t m : sizes) {
      std::vector<double> row(m);
      try {
        for (std::size_t j = 0; j < m; ++j) row[j] = autocov(std::min(j, m - j));
      } catch (const OutOfTableRange&) {
        break;  // cannot pad a tabulated covariance past its last knot
      }
      std::vector<double> eig = circulant_eigenvalues(row);
      const double lo = *std::min_element(eig.begin(), eig.end());
      const double hi = *std::max_element(eig.begin(), eig.end());
      min_eigenvalue_ = lo;
      if (lo < -1e-9 * std::max(1.0, hi)) continue;

      m_ = m;
      plan_->scale.resize(m / 2 + 1);
      const double md = static_cast<double>(m);
      for (std::size_t k = 0; k <= m / 2; ++k) {
        const double lam = std::max(0.0, eig[k]);
        const bool real_mode = (k == 0 || k == m / 2);
        plan_->scale[k] = std::sqrt(lam / (real_mode ? md : 2.0 * md));
      }
      std::unique_ptr<fftw_complex, FftwFree> spec(fftw_alloc_complex(m / 2 + 1));
      std::unique_ptr<double, FftwFree> real(fftw_alloc_real(m));
      std::lock_guard lock(fftw_planner_mutex());
      plan_->c2r = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec.get(), real.get(), FFTW_ESTIMATE);
      return;
    }
  }

  if (n > kMaxCholesky)
    throw EmbeddingFailure("circulant embedding is not nonnegative definite and n = " +
                           std::to_string(n) + " is too large for the Cholesky fallback");
  Eigen::MatrixXd cov(n, n);
  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = autocov(k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cov(i, j) = c[i > j ? i - j : j - i];
  cov.diagonal().array() += 1e-12;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw EmbeddingFailure("both circulant embedding and Cholesky factorization failed");
  plan_->chol = llt.matrixL();
  cholesky_ = true;
}

CirculantSampler::~CirculantSampler() {
  if (plan_ && plan_->c2r) {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_->c2r);
  }
}

CirculantSampler::Workspace CirculantSampler::make_workspace() const {
  Workspace ws;
  ws.buffers_ = std::make_unique<Workspace::Buffers>();
  if (cholesky_) {
    ws.buffers_->z.resize(static_cast<Eigen::Index>(n_));
  } else {
    ws.buffers_->spectrum.reset(fftw_alloc_complex(m_ / 2 + 1));
    ws.buffers_->real.reset(fftw_alloc_real(m_));
  }
  return ws;
}

void CirculantSampler::sample(Rng& rng, std::span<double> out, Workspace& ws) const {
  if (out.size() < n_) throw DomainError("output span shorter than sampler length");
  if (!ws.buffers_) ws = make_workspace();
  std::normal_distribution<double> normal;
  auto& buf = *ws.buffers_;

  if (cholesky_) {
    for (Eigen::Index i = 0; i < buf.z.size(); ++i) buf.z[i] = normal(rng);
    Eigen::Map<Eigen::VectorXd> x(out.data(), static_cast<Eigen::Index>(n_));
    x.noalias() = plan_->chol.triangularView<Eigen::Lower>() * buf.z;
    return;
  }

  fftw_complex* spec = buf.spectrum.get();
  const std::size_t half = m_ / 2;
  for (std::size_t k = 0; k <= half; ++k) {
    const double sd = plan_->scale[k];
    if (k == 0 || k == half) {
      spec[k][0] = sd * normal(rng);
      spec[k][1] = 0.0;
    } else {
      spec[k][0] = sd * normal(rng);
      spec[k][1] = sd * normal(rng);
    }
  }
  fftw_execute_dft_c2r(plan_->c2r, spec, buf.real.get());
  std::copy_n(buf.real.get(), n_, out.begin());
}

}  // namespace shepp
