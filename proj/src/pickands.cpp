#include "shepp/pickands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "shepp/errors.hpp"
#include "shepp/fieldsim.hpp"
#include "shepp/mc.hpp"

namespace shepp {

std::string to_string(PickandsMethod m) {
  return m == PickandsMethod::Ratio ? "ratio" : "truncated";
}

std::optional<double> known_value(double alpha) {
  if (alpha == 1.0) return 1.0;
  if (alpha == 2.0) return 1.0 / std::sqrt(std::numbers::pi);
  return std::nullopt;
}

double default_lambda(double alpha) {
  if (alpha <= 1.0) return 64.0;
  if (alpha >= 1.5) return 16.0;
  return 64.0 - (alpha - 1.0) / 0.5 * 48.0;
}

std::vector<PickandsEstimate> pickands_ladder(double alpha, double lambda, double eta,
                                              std::span<const std::size_t> strides, std::size_t n,
                                              std::uint64_t seed, PickandsMethod method,
                                              unsigned threads) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  if (!(lambda > 0.0) || !(eta > 0.0)) throw DomainError("lambda and eta must be positive");
  if (n < 100) throw DomainError("Pickands estimation needs n >= 100");
  if (strides.empty()) throw DomainError("stride ladder is empty");
  const double steps = lambda / eta;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-12 * std::max(1.0, steps) || rounded < 1.0)
    throw DomainError("mesh must divide lambda");
  const auto M = static_cast<std::size_t>(rounded);
  for (std::size_t s : strides)
    if (s == 0 || s > M) throw DomainError("stride must lie in [1, lambda / eta]");

  const bool two_sided = method == PickandsMethod::Ratio;
  const bool linear = alpha == 2.0;  // B_1(t) = N t exactly
  const std::size_t origin = two_sided ? M : 0;
  const std::size_t points = two_sided ? 2 * M + 1 : M + 1;

  std::vector<double> drift(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = (static_cast<double>(i) - static_cast<double>(origin)) * eta;
    drift[i] = std::pow(std::abs(t), alpha);
  }

  std::shared_ptr<const PathSimulator> sim;
  if (!linear)
    sim = std::make_shared<const PathSimulator>(IncrementVariance::fbm(alpha / 2.0), points, eta);

  const std::size_t S = strides.size();
  std::vector<double> values(n * S);
  parallel_chunks(n, std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(n)),
                  [&](unsigned, std::size_t begin, std::size_t end) {
                    PathSimulator::Scratch scratch;
                    if (sim) scratch = sim->make_scratch();
                    std::vector<double> w(points);
                    for (std::size_t k = begin; k < end; ++k) {
                      const std::uint64_t sub = derive_seed(seed, k);
                      if (linear) {
                        Rng rng(sub);
                        const double slope = std::normal_distribution<double>()(rng);
                        for (std::size_t i = 0; i < points; ++i) {
                          const double t = (static_cast<double>(i) - static_cast<double>(origin)) * eta;
                          w[i] = std::numbers::sqrt2 * slope * t - drift[i];
                        }
                      } else {
                        sim->generate(sub, w, scratch);
                        const double base = w[origin];
                        for (std::size_t i = 0; i < points; ++i)
                          w[i] = std::numbers::sqrt2 * (w[i] - base) - drift[i];
                      }
                      for (std::size_t q = 0; q < S; ++q) {
                        const std::size_t st = strides[q];
                        const std::size_t first = origin % st;
                        double top = -std::numeric_limits<double>::infinity();
                        for (std::size_t i = first; i < points; i += st) top = std::max(top, w[i]);
                        double v;
                        if (two_sided) {
                          double sum = 0.0;
                          for (std::size_t i = first; i < points; i += st) sum += std::exp(w[i] - top);
                          v = 1.0 / (static_cast<double>(st) * eta * sum);
                        } else {
                          v = std::exp(top) / lambda;
                        }
                        values[k * S + q] = v;
                      }
                    }
                  });

  std::vector<PickandsEstimate> out(S);
  for (std::size_t q = 0; q < S; ++q) {
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += values[k * S + q];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double e = values[k * S + q] - mean;
      ss += e * e;
    }
    auto& est = out[q];
    est.alpha = alpha;
    est.d = static_cast<double>(strides[q]) * eta;
    est.lambda = lambda;
    est.eta = eta;
    est.n = n;
    est.estimate = mean;
    est.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    est.seed = seed;
    est.method = method;
  }
  return out;
}

PickandsEstimate estimate_pickands(double alpha, double lambda, double eta, std::size_t n,
                                   std::uint64_t seed, PickandsMethod method, unsigned threads) {
  if (!(eta > 0.0) || eta > lambda / 256.0 * (1.0 + 1e-12))
    throw DomainError("simulation mesh must satisfy 0 < eta <= lambda / 256");
  const std::size_t one = 1;
  auto est = pickands_ladder(alpha, lambda, eta, std::span(&one, 1), n, seed, method, threads).front();
  est.d = 0.0;
  return est;
}

PickandsEstimate estimate_pickands_discrete(double alpha, double d, double lambda, std::size_t n,
                                            std::uint64_t seed, PickandsMethod method,
                                            unsigned threads) {
  if (!(d > 0.0)) throw DomainError("lattice mesh must be positive");
  const std::size_t one = 1;
  return pickands_ladder(alpha, lambda, d, std::span(&one, 1), n, seed, method, threads).front();
}

void append_pickands_ledger(const std::filesystem::path& file,
                            std::span<const PickandsEstimate> rows) {
  const bool fresh = !std::filesystem::exists(file) || std::filesystem::file_size(file) == 0;
  std::ofstream out(file, std::ios::app);
  if (!out) throw IoError("cannot open " + file.string() + " for appending");
  if (fresh) out << "alpha,d,lambda,eta,n,estimate,stderr,seed,method\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%zu,%.17g,%.17g,%llu,%s\n", r.alpha,
                  r.d, r.lambda, r.eta, r.n, r.estimate, r.std_error,
                  static_cast<unsigned long long>(r.seed), to_string(r.method).c_str());
    out << line;
  }
  if (!out) throw IoError("write failed for " + file.string());
}

}  // namespace shepp
