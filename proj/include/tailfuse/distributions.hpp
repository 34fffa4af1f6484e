#pragma once

#include "tailfuse/rng.hpp"

namespace tailfuse {

// Standard normal CDF, survival function and quantile. The quantile uses a
// rational approximation refined by one Halley step on the CDF, giving
// absolute error well below 1e-9.
double norm_cdf(double x);
double norm_sf(double x);
double norm_quantile(double p);  // requires 0 < p < 1

// Regularized incomplete beta I_x(a,b) by continued fraction, with the usual
// symmetry switch at x > (a+1)/(a+b+2).
double reg_inc_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a,x).
double reg_lower_gamma(double a, double x);

// Student t CDF / survival / quantile with real degrees of freedom nu > 0.
// The quantile is obtained by bracketed root-finding on the CDF.
double t_cdf(double x, double nu);
double t_sf(double x, double nu);
double t_quantile(double p, double nu);
// Solves t_sf(x, nu) = s for x > 0 (s in (0, 1/2]); the stable entry point
// when the survival probability is known directly.
double t_quantile_from_sf(double s, double nu);

// Samplers. All are pure functions of the stream state.
double exp_sample(RandomStream& rng);     // rate 1
double normal_sample(RandomStream& rng);  // standard normal, by inversion
double gamma_sample(double shape, RandomStream& rng);  // rate 1, shape > 0

// Small facade over the univariate families used across the project.
struct UnivariateDist {
  enum class Family { normal, student_t, cauchy, pareto, exponential, gamma, uniform };

  Family family;
  double param = 0.0;  // nu / tail index / shape where applicable

  static UnivariateDist normal() { return {Family::normal, 0.0}; }
  static UnivariateDist student_t(double nu);
  static UnivariateDist cauchy() { return {Family::cauchy, 0.0}; }
  static UnivariateDist pareto(double tail_index);
  static UnivariateDist exponential() { return {Family::exponential, 0.0}; }
  static UnivariateDist gamma(double shape);
  static UnivariateDist uniform() { return {Family::uniform, 0.0}; }

  double cdf(double x) const;
  double quantile(double p) const;  // requires 0 < p < 1
};

}  // namespace tailfuse
