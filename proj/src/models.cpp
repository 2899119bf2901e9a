#include "shepp/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "shepp/errors.hpp"
#include "shepp/numerics.hpp"

namespace shepp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw DomainError(std::string(who) + ": alpha must lie in (0, 2]");
}

void require_window(double a, double b) {
  if (!(a > 0.0 && b > a)) throw DomainError("window requires 0 < a < b");
}

// t^(2H) ((1 + x)^(2H) + (1 - x)^(2H) - 2) with x = h / t, for 0 < h < t.
double fbm_second_difference(double hurst, double t, double h) {
  const double p = 2.0 * hurst;
  if (h == 0.0) return 0.0;
  if (h < t) {
    const double x = h / t;
    return std::pow(t, p) * (std::expm1(p * std::log1p(x)) + std::expm1(p * std::log1p(-x)));
  }
  return std::pow(t + h, p) + std::pow(h - t, p) - 2.0 * std::pow(t, p);
}

// Breakpoints inside a quadrature over lags where a tabulated covariance has kinks.
std::vector<double> knot_breaks(const StationaryCovariance& cov, double shift, double sign) {
  std::vector<double> out;
  if (cov.family() != CovarianceFamily::Tabulated) return out;
  for (double knot : cov.table_lags()) out.push_back(sign * (knot - shift));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// StationaryCovariance

StationaryCovariance StationaryCovariance::fractional_ou(double alpha) {
  require_alpha(alpha, "fractional OU");
  StationaryCovariance c;
  c.family_ = CovarianceFamily::FractionalOU;
  c.alpha_ = alpha;
  c.a1_ = 1.0;
  return c;
}

StationaryCovariance StationaryCovariance::generalized_cauchy(double alpha, double beta) {
  require_alpha(alpha, "generalized Cauchy");
  if (!(beta > 0.0)) throw DomainError("generalized Cauchy: beta must be positive");
  StationaryCovariance c;
  c.family_ = CovarianceFamily::GeneralizedCauchy;
  c.alpha_ = alpha;
  c.beta_ = beta;
  c.a1_ = beta;
  return c;
}

StationaryCovariance StationaryCovariance::tabulated(std::vector<double> lags,
                                                     std::vector<double> values, double alpha,
                                                     double a1) {
  require_alpha(alpha, "tabulated covariance");
  if (!(a1 > 0.0)) throw DomainError("tabulated covariance: a1 must be positive");
  if (lags.size() != values.size() || lags.size() < 2)
    throw DomainError("tabulated covariance: need at least two (t, r) knots of equal count");
  if (lags.front() != 0.0 || values.front() != 1.0)
    throw DomainError("tabulated covariance: first knot must be (0, 1)");
  for (std::size_t i = 1; i < lags.size(); ++i) {
    if (!(lags[i] > lags[i - 1]))
      throw DomainError("tabulated covariance: lags must be strictly increasing");
    if (!(values[i] > -1.0 && values[i] <= 1.0))
      throw DomainError("tabulated covariance: values must lie in (-1, 1]");
  }
  StationaryCovariance c;
  c.family_ = CovarianceFamily::Tabulated;
  c.alpha_ = alpha;
  c.a1_ = a1;
  c.lags_ = std::move(lags);
  c.values_ = std::move(values);
  return c;
}

double StationaryCovariance::max_lag() const {
  return family_ == CovarianceFamily::Tabulated ? lags_.back()
                                                 : std::numeric_limits<double>::infinity();
}

double StationaryCovariance::operator()(double t) const {
  t = std::abs(t);
  switch (family_) {
    case CovarianceFamily::FractionalOU:
      return std::exp(-std::pow(t, alpha_));
    case CovarianceFamily::GeneralizedCauchy:
      return std::pow(1.0 + std::pow(t, alpha_), -beta_);
    case CovarianceFamily::Tabulated: {
      if (t > lags_.back()) {
        std::ostringstream msg;
        msg << "lag " << t << " beyond last table knot " << lags_.back();
        throw OutOfTableRange(msg.str());
      }
      const auto hi = std::upper_bound(lags_.begin(), lags_.end(), t);
      if (hi == lags_.end()) return values_.back();
      const std::size_t i = static_cast<std::size_t>(hi - lags_.begin());
      const double w = (t - lags_[i - 1]) / (lags_[i] - lags_[i - 1]);
      return values_[i - 1] + w * (values_[i] - values_[i - 1]);
    }
  }
  return 0.0;
}

double StationaryCovariance::one_minus(double t) const {
  t = std::abs(t);
  switch (family_) {
    case CovarianceFamily::FractionalOU:
      return -std::expm1(-std::pow(t, alpha_));
    case CovarianceFamily::GeneralizedCauchy:
      return -std::expm1(-beta_ * std::log1p(std::pow(t, alpha_)));
    case CovarianceFamily::Tabulated:
      return 1.0 - (*this)(t);
  }
  return 0.0;
}

std::string StationaryCovariance::describe() const {
  std::ostringstream out;
  switch (family_) {
    case CovarianceFamily::FractionalOU:
      out << "fou(alpha=" << alpha_ << ")";
      break;
    case CovarianceFamily::GeneralizedCauchy:
      out << "cauchy(alpha=" << alpha_ << ",beta=" << beta_ << ")";
      break;
    case CovarianceFamily::Tabulated:
      out << "tabulated(knots=" << lags_.size() << ",alpha=" << alpha_ << ",a1=" << a1_ << ")";
      break;
  }
  return out.str();
}

double eval_correlation(const StationaryCovariance& model, double t) {
  if (t < 0.0) throw DomainError("correlation lag must be nonnegative");
  return model(t);
}

// ---------------------------------------------------------------------------
// IncrementVariance

IncrementVariance IncrementVariance::fbm(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("fBm: Hurst index must lie in (0, 1)");
  IncrementVariance v;
  v.family_ = VarianceFamily::Fbm;
  v.weights_ = {1.0};
  v.hursts_ = {hurst};
  v.alpha_ = 2.0 * hurst;
  v.a2_ = 1.0;
  return v;
}

IncrementVariance IncrementVariance::mixed_fbm(std::vector<double> weights,
                                               std::vector<double> hursts) {
  if (weights.empty() || weights.size() != hursts.size())
    throw DomainError("mixed fBm: weights and Hurst indices must be nonempty and equally long");
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) throw DomainError("mixed fBm: weights must be positive");
    if (!(hursts[i] > 0.0 && hursts[i] < 1.0))
      throw DomainError("mixed fBm: Hurst indices must lie in (0, 1)");
    if (i > 0 && !(hursts[i] > hursts[i - 1]))
      throw DomainError("mixed fBm: Hurst indices must be strictly increasing");
    sum_sq += weights[i] * weights[i];
  }
  if (std::abs(sum_sq - 1.0) > 1e-12)
    throw DomainError("mixed fBm: squared weights must sum to 1");
  IncrementVariance v;
  v.family_ = VarianceFamily::MixedFbm;
  v.alpha_ = 2.0 * hursts.front();
  v.a2_ = weights.front() * weights.front();
  v.weights_ = std::move(weights);
  v.hursts_ = std::move(hursts);
  return v;
}

IncrementVariance IncrementVariance::integrated(StationaryCovariance zeta) {
  IncrementVariance v;
  v.family_ = VarianceFamily::Integrated;
  v.alpha_ = 2.0;
  v.a2_ = 1.0;
  v.zeta_.push_back(std::move(zeta));
  return v;
}

const StationaryCovariance& IncrementVariance::zeta() const {
  if (zeta_.empty()) throw DomainError("only the integrated family carries a zeta covariance");
  return zeta_.front();
}

double IncrementVariance::operator()(double t) const {
  t = std::abs(t);
  if (t == 0.0) return 0.0;
  if (family_ == VarianceFamily::Integrated) {
    const auto& r = zeta_.front();
    const auto breaks = knot_breaks(r, 0.0, 1.0);
    return 2.0 * integrate([&](double s) { return (t - s) * r(s); }, 0.0, t, 1e-10, breaks);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < hursts_.size(); ++i)
    total += weights_[i] * weights_[i] * std::pow(t, 2.0 * hursts_[i]);
  return total;
}

double IncrementVariance::second_difference(double t, double h) const {
  t = std::abs(t);
  h = std::abs(h);
  if (h == 0.0) return 0.0;
  if (family_ == VarianceFamily::Integrated) {
    // sigma^2'' = 2 r_zeta(|.|), so the central difference is a triangle-weighted integral.
    const auto& r = zeta_.front();
    std::vector<double> breaks{0.0, -t};
    for (double k : knot_breaks(r, t, 1.0)) breaks.push_back(k);
    for (double k : knot_breaks(r, -t, -1.0)) breaks.push_back(k);
    return 2.0 * integrate([&](double w) { return (h - std::abs(w)) * r(t + w); }, -h, h, 1e-10,
                           breaks);
  }
  if (t == 0.0) return 2.0 * (*this)(h);
  double total = 0.0;
  for (std::size_t i = 0; i < hursts_.size(); ++i)
    total += weights_[i] * weights_[i] * fbm_second_difference(hursts_[i], t, h);
  return total;
}

std::string IncrementVariance::describe() const {
  std::ostringstream out;
  switch (family_) {
    case VarianceFamily::Fbm:
      out << "fbm(H=" << hursts_.front() << ")";
      break;
    case VarianceFamily::MixedFbm:
      out << "mixed_fbm(";
      for (std::size_t i = 0; i < hursts_.size(); ++i)
        out << (i ? "," : "") << weights_[i] << "*B_" << hursts_[i];
      out << ")";
      break;
    case VarianceFamily::Integrated:
      out << "integrated[" << zeta_.front().describe() << "]";
      break;
  }
  return out.str();
}

double eval_variance(const IncrementVariance& model, double t) {
  if (t < 0.0) throw DomainError("variance lag must be nonnegative");
  return model(t);
}

// ---------------------------------------------------------------------------
// Field-level operations

std::string model_id(const FieldModel& model) {
  return std::visit(Overloaded{
                        [](const StationaryCovariance& c) { return "shepp:" + c.describe(); },
                        [](const IncrementVariance& v) { return "shepp:" + v.describe(); },
                        [](const Example21Field& f) {
                          return "example21:" + f.covariance.describe();
                        },
                    },
                    model);
}

double field_scale(const FieldModel& model, double tau) {
  return std::visit(Overloaded{
                        [&](const StationaryCovariance& c) { return std::sqrt(2.0 * c.one_minus(tau)); },
                        [&](const IncrementVariance& v) { return std::sqrt(v(tau)); },
                        [&](const Example21Field& f) { return f.sigma(tau); },
                    },
                    model);
}

LocalStructure local_structure(const FieldModel& model, double a, double b) {
  require_window(a, b);
  LocalStructure ls;
  ls.a = a;
  ls.b = b;
  std::visit(Overloaded{
                 [&](const StationaryCovariance& c) {
                   ls.alpha = c.alpha();
                   ls.g = [c](double tau) { return c.a1() / (2.0 * c.one_minus(tau)); };
                   for (double t : c.table_lags())
                     if (t > a && t < b) ls.breakpoints.push_back(t);
                 },
                 [&](const IncrementVariance& v) {
                   ls.alpha = v.alpha();
                   ls.g = [v](double tau) { return v.a2() / (2.0 * v(tau)); };
                 },
                 [&](const Example21Field& f) {
                   ls.alpha = f.covariance.alpha();
                   const double half_a1 = 0.5 * f.covariance.a1();
                   ls.g = [half_a1](double) { return half_a1; };
                 },
             },
             model);

  constexpr int kProbe = 256;
  for (int i = 0; i <= kProbe; ++i) {
    const double tau = a + (b - a) * i / kProbe;
    const double g = ls.g(tau);
    if (!(std::isfinite(g) && g > 0.0)) {
      std::ostringstream msg;
      msg << "increment variance vanishes at tau = " << tau << " for " << model_id(model);
      throw DegenerateVariance(msg.str());
    }
  }
  return ls;
}

double standardized_covariance(const FieldModel& model, FieldPoint p, FieldPoint q) {
  const double lag = p.s - q.s;
  return std::visit(
      Overloaded{
          [&](const StationaryCovariance& r) {
            const double num = r(lag + p.tau - q.tau) - r(lag + p.tau) - r(lag - q.tau) + r(lag);
            const double den = 2.0 * std::sqrt(r.one_minus(p.tau) * r.one_minus(q.tau));
            if (!(den > 0.0)) throw DegenerateVariance("r_X(tau) = 1 inside the window");
            return num / den;
          },
          [&](const IncrementVariance& v) {
            const double num = 0.5 * (v(lag + p.tau) + v(lag - q.tau) - v(lag + p.tau - q.tau) - v(lag));
            const double den = std::sqrt(v(p.tau) * v(q.tau));
            if (!(den > 0.0)) throw DegenerateVariance("sigma_X^2(tau) = 0 inside the window");
            return num / den;
          },
          [&](const Example21Field& f) {
            const auto& r = f.covariance;
            return 0.5 * (r(lag + p.tau - q.tau) + r(lag));
          },
      },
      model);
}

double shepp_correlation(const FieldModel& model, FieldPoint p, FieldPoint q) {
  if (p.tau == q.tau && p.s == q.s) {
    // Still surface degenerate normalizations.
    if (!(field_scale(model, p.tau) > 0.0))
      throw DegenerateVariance("field variance vanishes at tau = " + std::to_string(p.tau));
    return 1.0;
  }
  const double c = standardized_covariance(model, p, q);
  return std::clamp(c, -1.0, std::nextafter(1.0, 0.0));
}

double decorrelation_along_s(const FieldModel& model, double tau, double delta) {
  delta = std::abs(delta);
  return std::visit(
      Overloaded{
          [&](const StationaryCovariance& r) {
            const double second = r(tau + delta) + r(tau - delta) - 2.0 * r(tau);
            return (2.0 * r.one_minus(delta) + second) / (2.0 * r.one_minus(tau));
          },
          [&](const IncrementVariance& v) {
            return (2.0 * v(delta) - v.second_difference(tau, delta)) / (2.0 * v(tau));
          },
          [&](const Example21Field& f) { return f.covariance.one_minus(delta); },
      },
      model);
}

double unstandardized_variance(const FieldModel& model, double tau, double s) {
  const double t = s + tau;
  return std::visit(
      Overloaded{
          [&](const StationaryCovariance& r) {
            // Cov(X(x), X(y)) = r(x - y)
            return r(t - t) + r(s - s) - 2.0 * r(t - s);
          },
          [&](const IncrementVariance& v) {
            if (v.family() == VarianceFamily::Integrated) {
              const auto& r = v.zeta();
              // F(z) = int_0^z r(|y|) dy, odd in z.
              auto F = [&](double z) {
                const double sign = z < 0.0 ? -1.0 : 1.0;
                const double az = std::abs(z);
                return sign * integrate([&](double y) { return r(y); }, 0.0, az, 1e-12,
                                        knot_breaks(r, 0.0, 1.0));
              };
              // Cov(X(x), X(y)) = int_0^x int_0^y r(w - w') dw' dw = int_0^x [F(w) - F(w - y)] dw
              auto cov = [&](double x, double y) {
                return integrate([&](double w) { return F(w) - F(w - y); }, 0.0, x, 1e-11,
                                 std::vector<double>{y});
              };
              return cov(t, t) + cov(s, s) - 2.0 * cov(t, s);
            }
            // Sum of independent fBm components with Cov = (x^2H + y^2H - |x - y|^2H) / 2.
            double total = 0.0;
            for (std::size_t i = 0; i < v.hursts().size(); ++i) {
              const double p = 2.0 * v.hursts()[i];
              auto cov = [p](double x, double y) {
                return 0.5 * (std::pow(x, p) + std::pow(y, p) - std::pow(std::abs(x - y), p));
              };
              const double w2 = v.weights()[i] * v.weights()[i];
              total += w2 * (cov(t, t) + cov(s, s) - 2.0 * cov(t, s));
            }
            return total;
          },
          [&](const Example21Field& f) {
            const double sig = f.sigma(tau);
            const auto& r = f.covariance;
            return 0.5 * sig * sig * (r(0.0) + r(0.0));
          },
      },
      model);
}

A1Report validate_a1(const FieldModel& model, std::span<const FieldPoint> grid) {
  A1Report report;
  report.points = grid.size();
  for (const FieldPoint& p : grid) {
    const double std_var = standardized_covariance(model, p, p);
    report.max_standardized_deviation =
        std::max(report.max_standardized_deviation, std::abs(std_var - 1.0));
    const double scale = field_scale(model, p.tau);
    const double raw = unstandardized_variance(model, p.tau, p.s);
    report.max_scale_deviation =
        std::max(report.max_scale_deviation, std::abs(raw - scale * scale) / (scale * scale));
  }
  return report;
}

ExponentFit fit_local_exponent(const FieldModel& model, double a, double b, int k_min, int k_max,
                               double max_residual) {
  require_window(a, b);
  if (k_max - k_min < 2) throw DomainError("fit window needs at least three scales");
  ExponentFit fit;
  fit.tau_ref = 0.5 * (a + b);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int k = k_min; k <= k_max; ++k) {
    const double delta = std::ldexp(1.0, -k);
    const double d = decorrelation_along_s(model, fit.tau_ref, delta);
    if (!(d > 0.0 && std::isfinite(d)))
      throw FitFailure("nonpositive decorrelation at delta = 2^-" + std::to_string(k));
    xs.push_back(std::log(delta));
    ys.push_back(std::log(d));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.alpha_hat = sxy / sxx;
  const double intercept = my - fit.alpha_hat * mx;
  fit.coeff_hat = 0.5 * std::exp(intercept);
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + fit.alpha_hat * xs[i]);
    rss += e * e;
  }
  fit.residual_rms = std::sqrt(rss / n);
  if (fit.residual_rms > max_residual) {
    std::ostringstream msg;
    msg << "log-log fit residual " << fit.residual_rms << " exceeds " << max_residual;
    throw FitFailure(msg.str());
  }
  return fit;
}

std::vector<BermanPoint> berman_coefficient(const FieldModel& model, double a, double b,
                                            std::span<const double> v_grid,
                                            const BermanSearch& search) {
  require_window(a, b);
  if (search.tau_intervals < 1) throw DomainError("Berman search needs tau_intervals >= 1");
  const double ds = search.s_step > 0.0 ? search.s_step : 0.05 * std::min(1.0, a);
  const int m = search.tau_intervals;
  const double dtau = (b - a) / m;
  std::vector<double> taus(m + 1);
  for (int i = 0; i <= m; ++i) taus[i] = a + i * dtau;

  // Every correlation is a combination of one kernel f at |L|, |L + tau_i|,
  // |L - tau_j| and |L + (i - j) dtau|, divided by per-tau norms.
  enum class Kind { Stationary, Increment, Example21 } kind{};
  std::function<double(double)> f;
  std::vector<double> norm(m + 1, 1.0);
  std::visit(Overloaded{
                 [&](const StationaryCovariance& r) {
                   kind = Kind::Stationary;
                   f = [r](double x) { return r(x); };
                   for (int i = 0; i <= m; ++i) norm[i] = std::sqrt(2.0 * r.one_minus(taus[i]));
                 },
                 [&](const IncrementVariance& v) {
                   kind = Kind::Increment;
                   f = [v](double x) { return v(x); };
                   for (int i = 0; i <= m; ++i) norm[i] = std::sqrt(v(taus[i]));
                 },
                 [&](const Example21Field& e) {
                   kind = Kind::Example21;
                   f = [r = e.covariance](double x) { return r(x); };
                 },
             },
             model);

  std::vector<double> inv(m + 1);
  for (int i = 0; i <= m; ++i) inv[i] = 1.0 / norm[i];
  std::vector<double> f_plus(m + 1), f_minus(m + 1), f_diff(2 * m + 1);

  // Largest |r| over all (tau_i, tau_j) pairs at one lag.
  const auto lag_max = [&]<Kind K>(double f0) {
    double best = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double* cross = &f_diff[i + m];  // cross[-j] = f(|lag + (i - j) dtau|)
      double row = 0.0;
      for (int j = 0; j <= m; ++j) {
        double c;
        if constexpr (K == Kind::Stationary)
          c = (cross[-j] - f_plus[i] - f_minus[j] + f0) * inv[j];
        else if constexpr (K == Kind::Increment)
          c = 0.5 * (f_plus[i] + f_minus[j] - cross[-j] - f0) * inv[j];
        else
          c = 0.5 * (cross[-j] + f0);
        row = std::max(row, std::abs(c));
      }
      best = std::max(best, K == Kind::Example21 ? row : row * inv[i]);
    }
    return best;
  };

  std::vector<BermanPoint> out;
  for (double v : v_grid) {
    if (!(v > 1.0)) throw DomainError("Berman lags must exceed 1");
    const double horizon = search.horizon_factor * v;
    double delta = 0.0;
    const auto steps = static_cast<long long>(std::floor((horizon - v) / ds * (1.0 + 1e-12)));
    for (long long k = 0; k <= steps; ++k) {
      const double lag = v + static_cast<double>(k) * ds;
      const double f0 = f(lag);
      for (int i = 0; i <= m; ++i) {
        f_plus[i] = f(lag + taus[i]);
        f_minus[i] = f(std::abs(lag - taus[i]));
      }
      for (int d = -m; d <= m; ++d) f_diff[d + m] = f(std::abs(lag + d * dtau));
      double here = 0.0;
      switch (kind) {
        case Kind::Stationary: here = lag_max.template operator()<Kind::Stationary>(f0); break;
        case Kind::Increment: here = lag_max.template operator()<Kind::Increment>(f0); break;
        case Kind::Example21: here = lag_max.template operator()<Kind::Example21>(f0); break;
      }
      delta = std::max(delta, here);
    }
    out.push_back({v, delta, delta * std::log(v)});
  }
  return out;
}

}  // namespace shepp
