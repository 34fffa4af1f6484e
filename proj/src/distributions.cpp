#include "tailfuse/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tailfuse {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2Pi = 2.50662827463100050242;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 20000;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("reg_inc_beta: continued fraction did not converge (a=" +
                           std::to_string(a) + ", b=" + std::to_string(b) + ")");
}

// Series for the lower incomplete gamma, x < a + 1.
double gamma_series(double a, double x) {
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 20000;
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("reg_lower_gamma: series did not converge");
}

// Continued fraction for the upper incomplete gamma, x >= a + 1.
double gamma_cf(double a, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 20000;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("reg_lower_gamma: continued fraction did not converge");
}

// Acklam's rational approximation to the inverse normal CDF (|rel| < 1.2e-9
// before refinement).
double norm_quantile_approx(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double pl = 0.02425;

  if (p < pl) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - pl) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double norm_sf(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

double norm_quantile(double p) {
  require(p > 0.0 && p < 1.0, "norm_quantile: p must be in the open interval (0,1)");
  double x = norm_quantile_approx(p);
  // One Halley step on the CDF.
  const double e = norm_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  if (std::isfinite(u)) x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double reg_inc_beta(double a, double b, double x) {
  require(a > 0.0 && b > 0.0, "reg_inc_beta: a and b must be positive");
  require(x >= 0.0 && x <= 1.0, "reg_inc_beta: x must be in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const double bt = std::exp(lbeta + a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double reg_lower_gamma(double a, double x) {
  require(a > 0.0, "reg_lower_gamma: a must be positive");
  require(x >= 0.0, "reg_lower_gamma: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_cf(a, x);
}

double t_sf(double x, double nu) {
  require(nu > 0.0, "t_sf: nu must be positive");
  if (x == 0.0) return 0.5;
  const double ib = reg_inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
  return x > 0.0 ? 0.5 * ib : 1.0 - 0.5 * ib;
}

double t_cdf(double x, double nu) { return t_sf(-x, nu); }

double t_quantile_from_sf(double s, double nu) {
  require(nu > 0.0, "t_quantile: nu must be positive");
  require(s > 0.0 && s <= 0.5, "t_quantile_from_sf: s must be in (0, 1/2]");
  if (s == 0.5) return 0.0;

  const double log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                       0.5 * std::log(nu * kPi);
  // survival(x) <= exp(log_k) * x^(-nu) for x > 0, so the inverted bound
  // brackets the quantile from above.
  const double log_k = log_c + 0.5 * (nu - 1.0) * std::log(nu);
  double hi = std::exp(std::min((log_k - std::log(s)) / nu, 700.0));
  hi = std::max(hi, 1e-8);
  while (t_sf(hi, nu) > s) hi *= 2.0;
  double lo = 0.0;

  double x = hi > 2.0 ? hi : 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    const double f = t_sf(x, nu) - s;
    if (f > 0.0)
      lo = x;
    else
      hi = x;
    if (std::fabs(f) <= 1e-13 * s + 1e-18) break;
    const double pdf = std::exp(log_c - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
    double xn = pdf > 0.0 ? x + f / pdf : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (xn == x || hi - lo <= 1e-15 * (1.0 + hi)) break;
    x = xn;
  }
  return x;
}

double t_quantile(double p, double nu) {
  require(nu > 0.0, "t_quantile: nu must be positive");
  require(p > 0.0 && p < 1.0, "t_quantile: p must be in the open interval (0,1)");
  if (p == 0.5) return 0.0;
  if (p > 0.5) return t_quantile_from_sf(1.0 - p, nu);
  return -t_quantile_from_sf(p, nu);
}

double exp_sample(RandomStream& rng) { return -std::log(rng.next_unit()); }

double normal_sample(RandomStream& rng) { return norm_quantile(rng.next_unit()); }

double gamma_sample(double shape, RandomStream& rng) {
  require(shape > 0.0, "gamma_sample: shape must be positive");
  if (shape < 1.0) {
    // Boost: draw at shape+1 and scale by U^(1/shape).
    const double g = gamma_sample(shape + 1.0, rng);
    return g * std::pow(rng.next_unit(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze/accept.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z;
    double v;
    do {
      z = normal_sample(rng);
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_unit();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
    if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

UnivariateDist UnivariateDist::student_t(double nu) {
  if (!(nu > 0.0)) throw std::domain_error("UnivariateDist: nu must be positive");
  return {Family::student_t, nu};
}

UnivariateDist UnivariateDist::pareto(double tail_index) {
  if (!(tail_index > 0.0)) throw std::domain_error("UnivariateDist: tail index must be positive");
  return {Family::pareto, tail_index};
}

UnivariateDist UnivariateDist::gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("UnivariateDist: shape must be positive");
  return {Family::gamma, shape};
}

double UnivariateDist::cdf(double x) const {
  switch (family) {
    case Family::normal:
      return norm_cdf(x);
    case Family::student_t:
      return t_cdf(x, param);
    case Family::cauchy:
      return 0.5 + std::atan(x) / kPi;
    case Family::pareto:
      return x <= 1.0 ? 0.0 : 1.0 - std::pow(x, -param);
    case Family::exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-x);
    case Family::gamma:
      return x <= 0.0 ? 0.0 : reg_lower_gamma(param, x);
    case Family::uniform:
      return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x);
  }
  throw std::logic_error("UnivariateDist: unknown family");
}

double UnivariateDist::quantile(double p) const {
  require(p > 0.0 && p < 1.0, "UnivariateDist::quantile: p must be in (0,1)");
  switch (family) {
    case Family::normal:
      return norm_quantile(p);
    case Family::student_t:
      return t_quantile(p, param);
    case Family::cauchy:
      return std::tan(kPi * (p - 0.5));
    case Family::pareto:
      return std::pow(1.0 - p, -1.0 / param);
    case Family::exponential:
      return -std::log1p(-p);
    case Family::gamma: {
      // Bracketed Newton on the regularized lower incomplete gamma.
      double hi = param + 10.0 * std::sqrt(param) + 10.0;
      while (reg_lower_gamma(param, hi) < p) hi *= 2.0;
      double lo = 0.0;
      double x = 0.5 * hi;
      for (int it = 0; it < 200; ++it) {
        const double f = reg_lower_gamma(param, x) - p;
        if (f < 0.0)
          lo = x;
        else
          hi = x;
        if (std::fabs(f) <= 1e-14 * std::max(p, 1.0 - p) + 1e-18) break;
        const double lpdf = (param - 1.0) * std::log(x) - x - std::lgamma(param);
        const double pdf = std::exp(lpdf);
        double xn = pdf > 0.0 ? x - f / pdf : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (xn == x || hi - lo <= 1e-15 * (1.0 + hi)) break;
        x = xn;
      }
      return x;
    }
    case Family::uniform:
      return p;
  }
  throw std::logic_error("UnivariateDist: unknown family");
}

}  // namespace tailfuse
