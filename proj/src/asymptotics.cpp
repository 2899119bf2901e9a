#include "shepp/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "shepp/errors.hpp"
#include "shepp/numerics.hpp"

namespace shepp {

namespace {

constexpr double kRelTol = 1e-10;

void require_window(double a, double b) {
  if (!(a > 0.0) || !(b > a)) throw DomainError("tail constants require 0 < a < b");
}

void require_pickands(double pickands_sq) {
  if (!(pickands_sq > 0.0)) throw DomainError("squared Pickands constant must be positive");
}

std::vector<double> inner_knots(const StationaryCovariance& c, double a, double b) {
  std::vector<double> knots;
  for (double t : c.table_lags())
    if (t > a && t < b) knots.push_back(t);
  return knots;
}

}  // namespace

double normal_tail(double u) {
  // erfc(x) has relative sensitivity 2x^2 to its argument, so the rounding of
  // u / sqrt(2) alone costs ~1e-13 at u = 30. Carry the residual in lo and apply
  // erfc(x + lo) ~= erfc(x) exp(-2 x lo).
  constexpr double kInvSqrt2Hi = 0.7071067811865476;
  constexpr double kInvSqrt2Lo = -4.8336466567264565186e-17;
  const double x = u * kInvSqrt2Hi;
  const double lo = std::fma(u, kInvSqrt2Hi, -x) + u * kInvSqrt2Lo;
  const double tail = 0.5 * std::erfc(x);
  return x > 0.0 ? tail * std::exp(-2.0 * x * lo) : tail;
}

TailAsymptote tail_constant(const LocalStructure& ls, double pickands_sq, double T) {
  require_window(ls.a, ls.b);
  require_pickands(pickands_sq);
  const double p = 2.0 / ls.alpha;
  const double integral =
      integrate([&](double t) { return std::pow(ls.g(t), p); }, ls.a, ls.b, kRelTol, ls.breakpoints);
  return {pickands_sq * integral, ls.alpha, ls.a, ls.b, T};
}

double tail_rate(const TailAsymptote& ta, double u) {
  return ta.C * std::pow(u, 4.0 / ta.alpha) * normal_tail(u);
}

double tail_probability_asym(const TailAsymptote& ta, double u) {
  if (!(u > 0.0)) throw DomainError("asymptote requires u > 0");
  return ta.T * tail_rate(ta, u);
}

Normalizers normalizers(const TailAsymptote& ta, double T, double r, LocationForm form) {
  if (!(T > std::numbers::e)) throw DomainError("normalizers require T > e");
  if (!(r >= 0.0)) throw DomainError("Berman limit r must be nonnegative");
  if (!(ta.C > 0.0)) throw DomainError("tail constant must be positive");
  Normalizers n;
  n.T = T;
  n.r = r;
  n.a_T = std::sqrt(2.0 * std::log(T));
  const double k = 2.0 / ta.alpha - 0.5;
  double bracket = k * std::log(std::log(T)) + std::log(ta.C / std::sqrt(2.0 * std::numbers::pi));
  if (form == LocationForm::Consistent) bracket += k * std::numbers::ln2;
  n.b_T = n.a_T + bracket / n.a_T;
  return n;
}

double limit_cdf(double x, double r, int order) {
  if (!(r >= 0.0)) throw DomainError("limit law requires r >= 0");
  if (r == 0.0) return std::exp(-std::exp(-x));
  const auto& rule = gauss_hermite(order);
  const double scale = std::sqrt(2.0 * r);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * std::exp(-std::exp(-x - r + scale * rule.nodes[i]));
  return sum;
}

double prop31_constant(const StationaryCovariance& model, double a, double b, double pickands_sq) {
  require_window(a, b);
  require_pickands(pickands_sq);
  const double p = 2.0 / model.alpha();
  const auto knots = inner_knots(model, a, b);
  const double integral =
      integrate([&](double t) { return std::pow(model.one_minus(t), -p); }, a, b, kRelTol, knots);
  return pickands_sq * std::pow(0.5 * model.a1(), p) * integral;
}

double tail_prop31(const StationaryCovariance& model, double a, double b, double T, double u,
                   double pickands_sq) {
  const TailAsymptote ta{prop31_constant(model, a, b, pickands_sq), model.alpha(), a, b, T};
  return tail_probability_asym(ta, u);
}

double prop32_constant(const IncrementVariance& model, double a, double b, double pickands_sq) {
  require_window(a, b);
  require_pickands(pickands_sq);
  const double p = 2.0 / model.alpha();
  const double integral = integrate([&](double t) { return std::pow(model(t), -p); }, a, b, kRelTol);
  return pickands_sq * std::pow(0.5 * model.a2(), p) * integral;
}

double tail_prop32(const IncrementVariance& model, double a, double b, double T, double u,
                   double pickands_sq) {
  const TailAsymptote ta{prop32_constant(model, a, b, pickands_sq), model.alpha(), a, b, T};
  return tail_probability_asym(ta, u);
}

double fbm_tail_constant(double hurst, double a, double b, double pickands_sq) {
  require_window(a, b);
  require_pickands(pickands_sq);
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("Hurst index must lie in (0, 1)");
  return pickands_sq * std::pow(0.5, 1.0 / hurst) * (1.0 / a - 1.0 / b);
}

double mixed_fbm_tail_constant(std::span<const double> weights, std::span<const double> hursts,
                               double a, double b, double pickands_sq) {
  require_window(a, b);
  require_pickands(pickands_sq);
  if (weights.empty() || weights.size() != hursts.size())
    throw DomainError("mixed fBm needs matching, non-empty weight and Hurst lists");
  const double inv_h = 1.0 / hursts.front();
  const auto sigma2 = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      s += weights[i] * weights[i] * std::pow(t, 2.0 * hursts[i]);
    return s;
  };
  const double integral = integrate([&](double t) { return std::pow(sigma2(t), -inv_h); }, a, b, kRelTol);
  return pickands_sq * std::pow(0.5 * weights.front() * weights.front(), inv_h) * integral;
}

double integrated_tail_constant(const StationaryCovariance& zeta, double a, double b) {
  require_window(a, b);
  const auto inner = [&](double t) {
    std::vector<double> knots;
    for (double k : zeta.table_lags())
      if (k > 0.0 && k < t) knots.push_back(k);
    return integrate([&](double s) { return (t - s) * zeta(s); }, 0.0, t, 1e-12, knots);
  };
  const double outer = integrate([&](double t) { return 1.0 / inner(t); }, a, b, kRelTol);
  return outer / (4.0 * std::numbers::pi);
}

}  // namespace shepp
