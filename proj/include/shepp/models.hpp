#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace shepp {

enum class CovarianceFamily { FractionalOU, GeneralizedCauchy, Tabulated };

/// Correlation function r(t) of a zero-mean, unit-variance stationary Gaussian
/// process, together with its small-lag expansion r(t) = 1 - a1 |t|^alpha (1 + o(1)).
///
///   FractionalOU       r(t) = exp(-|t|^alpha),            a1 = 1
///   GeneralizedCauchy  r(t) = (1 + |t|^alpha)^(-beta),    a1 = beta
///   Tabulated          linear interpolation of (t, r) knots; alpha and a1 declared
///
/// Immutable; safe to share between threads.
class StationaryCovariance {
 public:
  static StationaryCovariance fractional_ou(double alpha);
  static StationaryCovariance generalized_cauchy(double alpha, double beta);
  /// Knots must start at t = 0 with r = 1, be strictly increasing in t and
  /// carry values in (-1, 1]. Positive-definiteness is not checked.
  static StationaryCovariance tabulated(std::vector<double> lags, std::vector<double> values,
                                        double alpha, double a1);

  /// r(|t|). Throws OutOfTableRange past the last knot of a tabulated model.
  double operator()(double t) const;
  /// 1 - r(|t|), evaluated without cancellation for the analytic families.
  double one_minus(double t) const;

  CovarianceFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double a1() const { return a1_; }
  double beta() const { return beta_; }
  /// Largest lag the model can evaluate (infinite for analytic families).
  double max_lag() const;
  std::span<const double> table_lags() const { return lags_; }
  std::span<const double> table_values() const { return values_; }
  std::string describe() const;

 private:
  StationaryCovariance() = default;

  CovarianceFamily family_ = CovarianceFamily::FractionalOU;
  double alpha_ = 1.0;
  double a1_ = 1.0;
  double beta_ = 0.0;
  std::vector<double> lags_;
  std::vector<double> values_;
};

double eval_correlation(const StationaryCovariance& model, double t);

enum class VarianceFamily { Fbm, MixedFbm, Integrated };

/// Variance function sigma^2(t) = Var(X(t)) of a stationary-increment process
/// with X(0) = 0, and its expansion sigma^2(t) = a2 |t|^alpha (1 + o(1)).
///
///   Fbm         sigma^2 = t^(2H),                      alpha = 2H,   a2 = 1
///   MixedFbm    sigma^2 = sum_i w_i^2 t^(2 H_i),       alpha = 2H_1, a2 = w_1^2
///   Integrated  sigma^2 = 2 int_0^t (t - s) r_zeta(s) ds, alpha = 2,  a2 = 1
class IncrementVariance {
 public:
  static IncrementVariance fbm(double hurst);
  /// Requires sum w_i^2 = 1 within 1e-12, w_i > 0 and strictly increasing H_i.
  static IncrementVariance mixed_fbm(std::vector<double> weights, std::vector<double> hursts);
  static IncrementVariance integrated(StationaryCovariance zeta);

  /// sigma^2(|t|); the integrated family uses adaptive quadrature to rel. tol 1e-10.
  double operator()(double t) const;
  /// sigma^2(t + h) + sigma^2(|t - h|) - 2 sigma^2(t), computed without
  /// cancellation, for t >= 0 and h >= 0.
  double second_difference(double t, double h) const;

  VarianceFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double a2() const { return a2_; }
  /// Hurst index of the leading (roughest) component; Fbm and MixedFbm only.
  double hurst() const { return hursts_.empty() ? 1.0 : hursts_.front(); }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> hursts() const { return hursts_; }
  /// Integrated family only.
  const StationaryCovariance& zeta() const;
  std::string describe() const;

 private:
  IncrementVariance() = default;

  VarianceFamily family_ = VarianceFamily::Fbm;
  double alpha_ = 1.0;
  double a2_ = 1.0;
  std::vector<double> weights_;
  std::vector<double> hursts_;
  std::vector<StationaryCovariance> zeta_;  // zero or one entry
};

double eval_variance(const IncrementVariance& model, double t);

/// Field (Y(tau + s) + X(s)) sigma(tau) / sqrt(2) built from two independent
/// stationary processes sharing `covariance`. sigma cancels after standardization.
struct Example21Field {
  StationaryCovariance covariance;
  std::function<double(double)> sigma = [](double) { return 1.0; };
};

/// Anything whose standardized field Z(tau, s) / sigma(tau) the library can
/// correlate and simulate. A StationaryCovariance or IncrementVariance stands
/// for the Shepp field (X(s + tau) - X(s)) / sd of that input process.
using FieldModel = std::variant<StationaryCovariance, IncrementVariance, Example21Field>;

std::string model_id(const FieldModel& model);

/// Locally stationary structure of the standardized field over [a, b]:
///   r(tau, s; tau + dt, s + ds) = 1 - g(tau) (|ds|^alpha + |dt + ds|^alpha) (1 + o(1)).
struct LocalStructure {
  double alpha = 1.0;
  std::function<double(double)> g;
  double a = 0.0;
  double b = 0.0;
  /// Points inside (a, b) where g has kinks (knots of a tabulated correlation).
  std::vector<double> breakpoints;
};

/// Throws DegenerateVariance when sigma_X^2(tau) = 0 or r_X(tau) = 1 on [a, b].
LocalStructure local_structure(const FieldModel& model, double a, double b);

struct FieldPoint {
  double tau = 0.0;
  double s = 0.0;
};

/// Exact correlation of the standardized field at two points, clamped to
/// [-1, 1]; exactly 1 when the points coincide.
double shepp_correlation(const FieldModel& model, FieldPoint p, FieldPoint q);

/// Covariance of the standardized field evaluated through the general
/// increment formula, without the coincident-point shortcut.
double standardized_covariance(const FieldModel& model, FieldPoint p, FieldPoint q);

/// 1 - r(tau, s; tau, s + delta), computed without forming r first.
double decorrelation_along_s(const FieldModel& model, double tau, double delta);

/// Variance of the unstandardized field Z(tau, s), recomputed through the
/// input process covariance (bilinear expansion), not through sigma^2(tau).
double unstandardized_variance(const FieldModel& model, double tau, double s);

/// Scale sigma(tau) of the unstandardized field.
double field_scale(const FieldModel& model, double tau);

struct A1Report {
  std::size_t points = 0;
  /// max |Var(Z / sigma) - 1| over the grid.
  double max_standardized_deviation = 0.0;
  /// max |Var Z(tau, s) - sigma(tau)^2| / sigma(tau)^2 over the grid.
  double max_scale_deviation = 0.0;
};

A1Report validate_a1(const FieldModel& model, std::span<const FieldPoint> grid);

struct ExponentFit {
  double alpha_hat = 0.0;
  /// Estimate of g(tau_ref): 1 - r ~ 2 g delta^alpha along s.
  double coeff_hat = 0.0;
  double residual_rms = 0.0;
  double tau_ref = 0.0;
};

/// Least-squares slope of log(1 - r(tau, s; tau, s + delta)) against log delta
/// over delta = 2^-k, k = k_min..k_max, at tau_ref = (a + b) / 2.
/// Throws FitFailure if the residual RMS exceeds max_residual.
ExponentFit fit_local_exponent(const FieldModel& model, double a, double b, int k_min = 8,
                               int k_max = 20, double max_residual = 0.05);

/// Discretization of the sup defining delta(v). Zero s_step means 0.05 min(1, a).
struct BermanSearch {
  double s_step = 0.0;
  int tau_intervals = 50;
  double horizon_factor = 10.0;
};

struct BermanPoint {
  double v = 0.0;
  double delta = 0.0;
  double product = 0.0;  ///< delta(v) ln v
};

/// delta(v) = max |r(tau, s; tau', s')| over tau, tau' in [a, b] and lags
/// v <= |s - s'| <= horizon_factor * v on the search grid; returns delta(v) ln v.
std::vector<BermanPoint> berman_coefficient(const FieldModel& model, double a, double b,
                                            std::span<const double> v_grid,
                                            const BermanSearch& search = {});

}  // namespace shepp
