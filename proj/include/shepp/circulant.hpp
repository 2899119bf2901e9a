#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>

#include "shepp/mc.hpp"

namespace shepp {

/// Exact sampler for a zero-mean stationary Gaussian sequence of length n
/// with autocovariance c(k), k = 0..n-1.
///
/// The covariance is embedded in a symmetric circulant of size 2(n - 1)
/// (padded to larger powers of two if that fails) and sampled through one
/// real inverse FFT per draw (Wood-Chan construction). Eigenvalues below
/// -1e-9 * max(1, lambda_max) reject an embedding; if every embedding is
/// rejected the sampler falls back to a dense Cholesky factor with 1e-12
/// diagonal jitter and records that in used_cholesky().
///
/// Immutable after construction. Concurrent sample() calls are safe as long
/// as each caller owns its Workspace.
class CirculantSampler {
 public:
  static constexpr std::size_t kMaxCholesky = 6000;

  CirculantSampler(const std::function<double(std::size_t)>& autocov, std::size_t n);
  ~CirculantSampler();
  CirculantSampler(const CirculantSampler&) = delete;
  CirculantSampler& operator=(const CirculantSampler&) = delete;

  std::size_t size() const { return n_; }
  std::size_t embedding_size() const { return m_; }
  bool used_cholesky() const { return cholesky_; }
  /// Smallest eigenvalue of the accepted (or last rejected) embedding.
  double min_eigenvalue() const { return min_eigenvalue_; }

  class Workspace {
   public:
    Workspace() = default;
    Workspace(Workspace&&) noexcept;
    Workspace& operator=(Workspace&&) noexcept;
    ~Workspace();

   private:
    friend class CirculantSampler;
    struct Buffers;
    std::unique_ptr<Buffers> buffers_;
  };

  Workspace make_workspace() const;
  /// Writes one draw into out[0..n).
  void sample(Rng& rng, std::span<double> out, Workspace& ws) const;

 private:
  struct Plan;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  bool cholesky_ = false;
  double min_eigenvalue_ = 0.0;
  std::unique_ptr<Plan> plan_;
};

}  // namespace shepp
