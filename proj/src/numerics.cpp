#include "shepp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "shepp/errors.hpp"
#include "shepp/mc.hpp"

namespace shepp {

namespace {

double integrate_piece(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                       unsigned max_depth) {
  if (hi == lo) return 0.0;
  // Boost's error estimates carry absolute floors, so tiny integrands on short
  // intervals never meet a relative target. Map to [0, 1] and rescale to O(1).
  const double width = hi - lo;
  double scale = 0.0;
  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) scale = std::max(scale, std::abs(f(lo + width * x)));
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  const double factor = width * scale;
  const auto unit = [&](double x) { return f(lo + width * x) / scale; };

  // Tanh-sinh first: callers split at every kink, so the remaining trouble sits at
  // the endpoints (power-law behaviour such as exp(-t^alpha) near 0), where it
  // converges quickly. Adaptive Gauss-Kronrod backs it up.
  thread_local boost::math::quadrature::tanh_sinh<double> tanh_sinh;
  double error = 0.0, l1 = 0.0;
  double value = NAN;
  try {
    // Boost stops early once the level-to-level error stalls; ask for a margin.
    value = tanh_sinh.integrate(unit, 0.0, 1.0, 0.1 * rel_tol, &error, &l1);
  } catch (const std::exception&) {
    value = NAN;
  }
  if (!std::isfinite(value) || error > rel_tol * l1) {
    value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(unit, 0.0, 1.0, max_depth, rel_tol,
                                                                          &error, &l1);
  }
  if (!std::isfinite(value) || error > rel_tol * l1 + 1e-300) {
    std::ostringstream msg;
    msg << "quadrature over [" << lo << ", " << hi << "] reached error " << error * std::abs(factor)
        << " against tolerance " << rel_tol * l1 * std::abs(factor);
    throw QuadratureFailure(msg.str());
  }
  return factor * value;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                 std::span<const double> breakpoints, unsigned max_depth) {
  if (hi < lo) return -integrate(f, hi, lo, rel_tol, breakpoints, max_depth);
  std::vector<double> cuts{lo};
  for (double x : breakpoints)
    if (x > lo && x < hi) cuts.push_back(x);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate_piece(f, cuts[i], cuts[i + 1], rel_tol, max_depth);
  return total;
}

const GaussHermiteRule& gauss_hermite(int order) {
  if (order < 1) throw DomainError("Gauss-Hermite order must be positive");
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  // Jacobi matrix of the probabilists' Hermite polynomials: zero diagonal,
  // off-diagonal sqrt(k). Nodes are its eigenvalues, weights the squared first
  // components of the normalized eigenvectors.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

McEstimate binomial_estimate(std::size_t hits, std::size_t n, double u, std::uint64_t seed) {
  McEstimate est;
  est.n = n;
  est.u = u;
  est.seed = seed;
  if (n == 0) return est;
  est.p_hat = static_cast<double>(hits) / static_cast<double>(n);
  est.std_error = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n));
  return est;
}

bool agree_within(const McEstimate& a, const McEstimate& b, double k) {
  const double se = std::hypot(a.std_error, b.std_error);
  return std::abs(a.p_hat - b.p_hat) <= k * se;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SHEPP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

void parallel_chunks(std::size_t n, unsigned threads,
                     const std::function<void(unsigned, std::size_t, std::size_t)>& body) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2) {
    body(0, 0, n);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    if (begin == end) break;
    workers.emplace_back([&, w, begin, end] {
      try {
        body(w, begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace shepp
