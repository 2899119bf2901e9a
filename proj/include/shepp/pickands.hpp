#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shepp {

/// Estimator of H_alpha (or its lattice version H_{alpha,d}).
///
/// Ratio: E[ max_t e^{W(t)} / (d sum_t e^{W(t)}) ] with W(t) = sqrt2 B(t) - |t|^alpha
///   over the lattice d Z cut to [-lambda, lambda], B a two-sided fBm of Hurst
///   alpha / 2. Unbiased for H_{alpha,d} up to the window cut, and bounded by 1/d.
/// Truncated: lambda^-1 E exp(max_{t in [0, lambda]} W(t)) on the lattice. This is
///   the textbook definition; its summands have a Pareto(1)-like tail, so at
///   n = 1e4 the sample mean sits well below the target with high probability.
enum class PickandsMethod { Ratio, Truncated };

std::string to_string(PickandsMethod m);

struct PickandsEstimate {
  double alpha = 1.0;
  double d = 0.0;       ///< lattice mesh actually used
  double lambda = 0.0;
  double eta = 0.0;     ///< simulation mesh
  std::size_t n = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  PickandsMethod method = PickandsMethod::Ratio;
};

/// 1 for alpha = 1, 1/sqrt(pi) for alpha = 2, empty otherwise.
std::optional<double> known_value(double alpha);

/// Default window: 64 for alpha <= 1, 16 for alpha >= 1.5, linear in between.
double default_lambda(double alpha);

/// Requires 0 < alpha <= 2, lambda > 0, eta <= lambda / 256, n >= 100.
/// Replication k draws its path from derive_seed(seed, k); threads = 0 resolves
/// through resolve_threads.
PickandsEstimate estimate_pickands(double alpha, double lambda, double eta, std::size_t n,
                                   std::uint64_t seed, PickandsMethod method = PickandsMethod::Ratio,
                                   unsigned threads = 0);

/// Same estimator on the lattice {0, d, 2d, ...}; d must divide lambda within 1e-12.
PickandsEstimate estimate_pickands_discrete(double alpha, double d, double lambda, std::size_t n,
                                            std::uint64_t seed,
                                            PickandsMethod method = PickandsMethod::Ratio,
                                            unsigned threads = 0);

/// Estimates on nested lattices d = stride * eta, all evaluated on the same
/// simulated paths (one per replication, mesh eta).
std::vector<PickandsEstimate> pickands_ladder(double alpha, double lambda, double eta,
                                              std::span<const std::size_t> strides, std::size_t n,
                                              std::uint64_t seed, PickandsMethod method,
                                              unsigned threads = 0);

/// Appends rows "alpha,d,lambda,eta,n,estimate,stderr,seed,method" to a CSV
/// ledger, writing the header first if the file is new or empty.
void append_pickands_ledger(const std::filesystem::path& file,
                            std::span<const PickandsEstimate> rows);

}  // namespace shepp
