#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tailfuse/transforms.hpp"

namespace tailfuse {

// Discrete spectral measure on the L1 unit simplex: atoms theta^(k) with
// masses m_k > 0. Validity requires sum_k m_k theta_i^(k) = 1 per coordinate.
struct SpectralMeasure {
  std::vector<std::vector<double>> atoms;
  std::vector<double> masses;

  std::size_t dim() const { return atoms.empty() ? 0 : atoms.front().size(); }

  // Unit mass at every basis vector.
  static SpectralMeasure independence(std::size_t n);
  // Single atom at the simplex center with total mass n.
  static SpectralMeasure comonotone(std::size_t n);
};

struct SpectralDiagnostics {
  enum class Kind { independence_type, comonotone_type, mixed };
  std::vector<double> coordinate_moments;
  double total_mass = 0.0;
  bool moment_ok = false;
  Kind kind = Kind::mixed;
};

// Checks the simplex and moment constraints; throws if an atom leaves the
// simplex, reports the per-coordinate moments and a classification otherwise.
SpectralDiagnostics validate_spectral(const SpectralMeasure& h);

// Parametric stable tail dependence functions.
struct IndependenceEll {
  std::size_t n;
};
struct ComonotoneEll {
  std::size_t n;
};
struct LogisticEll {
  double alpha;  // 0 < alpha <= 1
  std::size_t n;
};
struct GumbelBivEll {
  double theta;  // >= 1
  double a;      // in [0,1]
  double b;      // in [0,1]
};
struct GalambosBivEll {
  double theta;  // > 0
  double a;      // in [0,1]
  double b;      // in [0,1]
};

using EllSpec = std::variant<IndependenceEll, ComonotoneEll, LogisticEll, GumbelBivEll,
                             GalambosBivEll, SpectralMeasure>;

std::size_t ell_dim(const EllSpec& spec);

// Stable tail dependence function l(v) for v >= 0 componentwise.
double ell_eval(const EllSpec& spec, std::span<const double> v);

// Extreme value copula C*(u) = exp(-l(-log u)).
double cstar_eval(const EllSpec& spec, std::span<const double> u);

// Scaled type-I error limit under complete dependence:
// (1/n) (sum_i omega_i^(1/gamma))^gamma.
double q_bound(double gamma, const WeightVector& w);

// Scaled type-I error limit for a discrete spectral measure:
// (1/n) sum_k m_k (sum_i (omega_i theta_i^(k))^(1/gamma))^gamma.
double q_gamma_spectral(double gamma, const SpectralMeasure& h, const WeightVector& w);

// Tail ratio lim Pr(mean > t) / ((1/n) sum_i Pr(X_i > t)) of an MRV vector
// with spectral measure h and marginal scale vector c.
double h_tail_ratio(double gamma, const SpectralMeasure& h, std::span<const double> c);

// Asymptotic rejection-rate ratio of the gamma = 1 combination test over the
// weighted Bonferroni test: n / l(omega). Lies in [1, n].
double bonferroni_ratio(const EllSpec& spec, const WeightVector& w);

// Asymptotic power ratio over Bonferroni for marginal scales c > 0:
// sum_i c_i / l(c).
double power_ratio(const EllSpec& spec, std::span<const double> c);

enum class ConvexOrderVerdict { first_dominates, second_dominates, equal, incomparable };

std::string to_string(ConvexOrderVerdict v);

// Convex-order comparison of two bivariate spectral measures through their
// integrated first-marginal mass functions.
ConvexOrderVerdict convex_order_bivariate(const SpectralMeasure& h1,
                                          const SpectralMeasure& h2);

}  // namespace tailfuse
