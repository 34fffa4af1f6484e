// Test-only reference implementations, independent of the library's numeric
// paths: quadrature-based CDFs, bisection inversion, a KS statistic and a
// brute-force Kendall tau.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double normal_cdf(double x) {
  if (x < -9.0) return 0.0;
  if (x > 9.0) return 1.0;
  return 0.5 + (x >= 0 ? integrate(normal_pdf, 0.0, x)
                       : -integrate(normal_pdf, x, 0.0));
}

inline double t_pdf(double x, double nu) {
  const double lc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(nu * M_PI);
  return std::exp(lc - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

// t CDF by quadrature of the density (tail mass by symmetry + quadrature up
// to a far cutoff chosen from the regularly varying tail).
inline double t_cdf(double x, double nu) {
  const auto pdf = [nu](double t) { return t_pdf(t, nu); };
  if (x >= 0.0) return 0.5 + integrate(pdf, 0.0, x);
  return 0.5 - integrate(pdf, x, 0.0);
}

// Inverts a strictly increasing function by bisection.
inline double invert(const std::function<double(double)>& f, double target, double lo,
                     double hi, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double norm_quantile(double p) {
  return invert([](double x) { return normal_cdf(x); }, p, -12.0, 12.0);
}

// Bracket sized for moderate p; widen the caller's bracket for extreme tails.
inline double t_quantile(double p, double nu, double bracket = 1e3) {
  return invert([nu](double x) { return t_cdf(x, nu); }, p, -bracket, bracket, 120);
}

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double c = cdf(sample[i]);
    d = std::max(d, std::fabs(c - static_cast<double>(i) / m));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / m - c));
  }
  return d;
}

// 1% asymptotic critical value of the KS statistic.
inline double ks_crit_1pct(std::size_t m) {
  return 1.6276 / std::sqrt(static_cast<double>(m));
}

// O(m^2) Kendall tau for cross-checking the fast implementation.
inline double kendall_tau_brute(std::span<const double> x, std::span<const double> y) {
  long long conc = 0;
  long long disc = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (s > 0)
        ++conc;
      else if (s < 0)
        ++disc;
    }
  const double pairs = 0.5 * static_cast<double>(x.size()) *
                       static_cast<double>(x.size() - 1);
  return (static_cast<double>(conc) - static_cast<double>(disc)) / pairs;
}

}  // namespace oracle
