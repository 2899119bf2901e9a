#pragma once

#include <functional>
#include <span>
#include <vector>

namespace shepp {

/// Integrates f over [lo, hi] piece by piece: tanh-sinh on each piece, with
/// adaptive Gauss-Kronrod (7/15, up to max_depth bisections) as fallback.
///
/// Throws QuadratureFailure when neither meets rel_tol relative to the L1 norm.
/// Interior breakpoints, if given, split the range first; use them for
/// integrands with kinks (tabulated covariances).
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-10, std::span<const double> breakpoints = {},
                 unsigned max_depth = 30);

/// Nodes and weights for integrating against the standard normal density:
/// E g(N) ~= sum_i weights[i] * g(nodes[i]).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Probabilists' Gauss-Hermite rule of the given order (Golub-Welsch).
/// Rules are cached per order; the returned reference stays valid.
const GaussHermiteRule& gauss_hermite(int order);

}  // namespace shepp
