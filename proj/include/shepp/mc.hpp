#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace shepp {

using Rng = std::mt19937_64;

/// Counter-based seed fan-out: replication k of a run seeded with `seed`
/// draws from Rng(derive_seed(seed, k)). The mixer is the splitmix64 finalizer
/// applied to seed + (k + 1) * golden_gamma, so sub-seeds are reproducible and
/// independent of scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) noexcept {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Monte Carlo exceedance estimate with binomial standard error.
struct McEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double u = 0.0;
  std::string config_digest;
  std::uint64_t seed = 0;
};

/// p_hat = hits / n, std_error = sqrt(p_hat (1 - p_hat) / n).
McEstimate binomial_estimate(std::size_t hits, std::size_t n, double u, std::uint64_t seed);

/// |p1 - p2| <= k * sqrt(se1^2 + se2^2)
bool agree_within(const McEstimate& a, const McEstimate& b, double k);

/// Worker count: explicit value if > 0, else SHEPP_THREADS, else 1.
unsigned resolve_threads(unsigned requested);

/// Runs body(worker, begin, end) over contiguous chunks of [0, n) on `threads`
/// workers. Each worker owns one chunk, so per-worker scratch can be indexed
/// by `worker`. Exceptions from workers are rethrown on the calling thread.
void parallel_chunks(std::size_t n, unsigned threads,
                     const std::function<void(unsigned, std::size_t, std::size_t)>& body);

/// Maps replication index -> value in parallel. The result is independent of
/// the worker count because each index writes its own slot.
template <class Scratch, class MakeScratch, class Fn>
std::vector<double> parallel_replications(std::size_t n, unsigned threads, MakeScratch make_scratch,
                                          Fn fn) {
  std::vector<double> out(n);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  parallel_chunks(n, threads, [&](unsigned, std::size_t begin, std::size_t end) {
    Scratch scratch = make_scratch();
    for (std::size_t k = begin; k < end; ++k) out[k] = fn(k, scratch);
  });
  return out;
}

}  // namespace shepp
