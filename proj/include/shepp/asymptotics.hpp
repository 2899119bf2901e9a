#pragma once

#include <span>

#include "shepp/models.hpp"

namespace shepp {

/// Psi(u) = 1 - Phi(u), computed as erfc(u / sqrt 2) / 2.
///
/// Relative error is at rounding level for u up to about 37.5; beyond that the
/// result is subnormal (precision degrades gradually) and it is 0 past u ~ 38.5.
double normal_tail(double u);

/// Leading-order tail of the field maximum over [a, b] x [0, T]:
///   P(max > u) ~ T * C * u^(4/alpha) * Psi(u),  C = H_alpha^2 int_a^b g^(2/alpha).
struct TailAsymptote {
  double C = 0.0;
  double alpha = 1.0;
  double a = 0.0;
  double b = 0.0;
  double T = 1.0;
};

/// C by adaptive quadrature of g^(2/alpha) to relative tolerance 1e-10.
TailAsymptote tail_constant(const LocalStructure& ls, double pickands_sq, double T = 1.0);

/// w(u) = C u^(4/alpha) Psi(u), the asymptote per unit horizon.
double tail_rate(const TailAsymptote& ta, double u);

/// T * w(u). Not clamped: values above 1 at small u are returned as is.
double tail_probability_asym(const TailAsymptote& ta, double u);

/// Location sequence variant.
///
/// Consistent: b_T = a_T + [(2/alpha - 1/2)(ln ln T + ln 2) + ln(C / sqrt(2 pi))] / a_T,
///   the solution of T w(b_T) -> 1.
/// Printed: the same without the (2/alpha - 1/2) ln 2 term, for which
///   T w(b_T) -> 2^(2/alpha - 1/2) instead of 1.
enum class LocationForm { Consistent, Printed };

struct Normalizers {
  double a_T = 0.0;
  double b_T = 0.0;
  double r = 0.0;
  double T = 0.0;
};

/// a_T = sqrt(2 ln T) and b_T per `form`. Throws DomainError if T <= e or r < 0.
Normalizers normalizers(const TailAsymptote& ta, double T, double r = 0.0,
                        LocationForm form = LocationForm::Consistent);

/// G_r(x) = E exp(-exp(-x - r + sqrt(2r) N)) by Gauss-Hermite quadrature;
/// r = 0 is evaluated in closed form.
double limit_cdf(double x, double r, int order = 64);

/// Stationary input: C = H^2 (a1/2)^(2/alpha) int_a^b (1 - r_X)^(-2/alpha).
double prop31_constant(const StationaryCovariance& model, double a, double b, double pickands_sq);
double tail_prop31(const StationaryCovariance& model, double a, double b, double T, double u,
                   double pickands_sq);

/// Stationary-increment input: C = H^2 (a2/2)^(2/alpha) int_a^b sigma_X^(-4/alpha).
double prop32_constant(const IncrementVariance& model, double a, double b, double pickands_sq);
double tail_prop32(const IncrementVariance& model, double a, double b, double T, double u,
                   double pickands_sq);

/// fBm closed form: H_{2H}^2 (1/2)^(1/H) (1/a - 1/b).
double fbm_tail_constant(double hurst, double a, double b, double pickands_sq);

/// Mixed fBm with a2 = w_1^2:
///   C = H_{2H_1}^2 (w_1^2 / 2)^(1/H_1) int_a^b (sum_i w_i^2 t^(2 H_i))^(-1/H_1) dt.
/// The published specialization writes the prefactor as (1/2)^(1/H_1); the two
/// agree only when w_1 = 1.
double mixed_fbm_tail_constant(std::span<const double> weights, std::span<const double> hursts,
                               double a, double b, double pickands_sq);

/// Integrated process (alpha = 2, H_2^2 = 1/pi):
///   C = (1 / (4 pi)) int_a^b (int_0^t (t - s) r_zeta(s) ds)^(-1) dt.
double integrated_tail_constant(const StationaryCovariance& zeta, double a, double b);

}  // namespace shepp
