#include "tailfuse/theory.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tailfuse {

namespace {

constexpr double kAtomTol = 1e-12;
constexpr double kMomentTol = 1e-9;

void check_measure_shape(const SpectralMeasure& h) {
  if (h.atoms.empty() || h.atoms.size() != h.masses.size())
    throw std::invalid_argument("SpectralMeasure: atoms and masses must be non-empty and aligned");
  const std::size_t n = h.atoms.front().size();
  if (n == 0) throw std::invalid_argument("SpectralMeasure: zero-dimensional atom");
  for (std::size_t k = 0; k < h.atoms.size(); ++k) {
    if (h.atoms[k].size() != n)
      throw std::invalid_argument("SpectralMeasure: atoms of unequal dimension");
    if (!(h.masses[k] > 0.0))
      throw std::invalid_argument("SpectralMeasure: masses must be positive");
    double s = 0.0;
    for (double t : h.atoms[k]) {
      if (!(t >= 0.0)) throw std::invalid_argument("SpectralMeasure: atom with negative coordinate");
      s += t;
    }
    if (std::fabs(s - 1.0) > kAtomTol)
      throw std::invalid_argument("SpectralMeasure: atom off the unit simplex");
  }
}

void require_valid(const SpectralMeasure& h) {
  const SpectralDiagnostics d = validate_spectral(h);
  if (!d.moment_ok)
    throw std::invalid_argument(
        "SpectralMeasure: moment constraint sum_k m_k theta_i = 1 violated");
}

void check_nonneg(std::span<const double> v, const char* msg) {
  for (double x : v)
    if (!(x >= 0.0)) throw std::domain_error(msg);
}

}  // namespace

SpectralMeasure SpectralMeasure::independence(std::size_t n) {
  SpectralMeasure h;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> atom(n, 0.0);
    atom[i] = 1.0;
    h.atoms.push_back(std::move(atom));
    h.masses.push_back(1.0);
  }
  return h;
}

SpectralMeasure SpectralMeasure::comonotone(std::size_t n) {
  SpectralMeasure h;
  h.atoms.push_back(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  h.masses.push_back(static_cast<double>(n));
  return h;
}

SpectralDiagnostics validate_spectral(const SpectralMeasure& h) {
  check_measure_shape(h);
  const std::size_t n = h.dim();
  SpectralDiagnostics d;
  d.coordinate_moments.assign(n, 0.0);
  for (std::size_t k = 0; k < h.atoms.size(); ++k) {
    d.total_mass += h.masses[k];
    for (std::size_t i = 0; i < n; ++i)
      d.coordinate_moments[i] += h.masses[k] * h.atoms[k][i];
  }
  d.moment_ok = true;
  for (double m : d.coordinate_moments)
    if (std::fabs(m - 1.0) > kMomentTol) d.moment_ok = false;

  bool all_basis = true;
  for (const auto& atom : h.atoms) {
    std::size_t positives = 0;
    for (double t : atom)
      if (t > kAtomTol) ++positives;
    if (positives > 1) all_basis = false;
  }
  bool center_only = h.atoms.size() == 1;
  if (center_only)
    for (double t : h.atoms.front())
      if (std::fabs(t - 1.0 / static_cast<double>(n)) > 1e-9) center_only = false;

  if (all_basis)
    d.kind = SpectralDiagnostics::Kind::independence_type;
  else if (center_only)
    d.kind = SpectralDiagnostics::Kind::comonotone_type;
  else
    d.kind = SpectralDiagnostics::Kind::mixed;
  return d;
}

std::size_t ell_dim(const EllSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IndependenceEll> ||
                      std::is_same_v<T, ComonotoneEll>)
          return s.n;
        else if constexpr (std::is_same_v<T, LogisticEll>)
          return s.n;
        else if constexpr (std::is_same_v<T, SpectralMeasure>)
          return s.dim();
        else
          return 2;
      },
      spec);
}

double ell_eval(const EllSpec& spec, std::span<const double> v) {
  if (v.size() != ell_dim(spec))
    throw std::invalid_argument("ell_eval: argument dimension mismatch");
  check_nonneg(v, "ell_eval: arguments must be non-negative");

  if (const auto* s = std::get_if<IndependenceEll>(&spec)) {
    (void)s;
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum;
  }
  if (std::get_if<ComonotoneEll>(&spec)) {
    return *std::max_element(v.begin(), v.end());
  }
  if (const auto* s = std::get_if<LogisticEll>(&spec)) {
    if (!(s->alpha > 0.0 && s->alpha <= 1.0))
      throw std::domain_error("LogisticEll: alpha must be in (0,1]");
    double sum = 0.0;
    for (double x : v) sum += std::pow(x, 1.0 / s->alpha);
    return std::pow(sum, s->alpha);
  }
  if (const auto* s = std::get_if<GumbelBivEll>(&spec)) {
    if (!(s->theta >= 1.0)) throw std::domain_error("GumbelBivEll: theta must be >= 1");
    if (!(s->a >= 0.0 && s->a <= 1.0 && s->b >= 0.0 && s->b <= 1.0))
      throw std::domain_error("GumbelBivEll: a and b must be in [0,1]");
    const double ta = s->a * v[0];
    const double tb = s->b * v[1];
    const double core = std::pow(std::pow(ta, s->theta) + std::pow(tb, s->theta),
                                 1.0 / s->theta);
    return (1.0 - s->a) * v[0] + (1.0 - s->b) * v[1] + core;
  }
  if (const auto* s = std::get_if<GalambosBivEll>(&spec)) {
    if (!(s->theta > 0.0)) throw std::domain_error("GalambosBivEll: theta must be positive");
    if (!(s->a >= 0.0 && s->a <= 1.0 && s->b >= 0.0 && s->b <= 1.0))
      throw std::domain_error("GalambosBivEll: a and b must be in [0,1]");
    const double ta = s->a * v[0];
    const double tb = s->b * v[1];
    if (ta == 0.0 || tb == 0.0) return v[0] + v[1];
    const double core = std::pow(std::pow(ta, -s->theta) + std::pow(tb, -s->theta),
                                 -1.0 / s->theta);
    return v[0] + v[1] - core;
  }
  const auto& h = std::get<SpectralMeasure>(spec);
  require_valid(h);
  double sum = 0.0;
  for (std::size_t k = 0; k < h.atoms.size(); ++k) {
    double mx = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) mx = std::max(mx, v[i] * h.atoms[k][i]);
    sum += h.masses[k] * mx;
  }
  return sum;
}

double cstar_eval(const EllSpec& spec, std::span<const double> u) {
  if (u.size() != ell_dim(spec))
    throw std::invalid_argument("cstar_eval: argument dimension mismatch");
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > 1.0 || u[i] < 0.0)
      throw std::domain_error("cstar_eval: arguments must be in [0,1]");
    if (u[i] == 0.0) return 0.0;
    v[i] = -std::log(u[i]);
  }
  return std::exp(-ell_eval(spec, v));
}

double q_bound(double gamma, const WeightVector& w) {
  if (!(gamma > 0.0)) throw std::domain_error("q_bound: gamma must be positive");
  double s = 0.0;
  for (double wi : w.values()) s += std::pow(wi, 1.0 / gamma);
  return std::pow(s, gamma) / static_cast<double>(w.size());
}

double q_gamma_spectral(double gamma, const SpectralMeasure& h, const WeightVector& w) {
  if (!(gamma > 0.0)) throw std::domain_error("q_gamma_spectral: gamma must be positive");
  require_valid(h);
  if (w.size() != h.dim())
    throw std::invalid_argument("q_gamma_spectral: weight dimension mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < h.atoms.size(); ++k) {
    double inner = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      inner += std::pow(w[i] * h.atoms[k][i], 1.0 / gamma);
    total += h.masses[k] * std::pow(inner, gamma);
  }
  return total / static_cast<double>(w.size());
}

double h_tail_ratio(double gamma, const SpectralMeasure& h, std::span<const double> c) {
  if (!(gamma > 0.0)) throw std::domain_error("h_tail_ratio: gamma must be positive");
  require_valid(h);
  if (c.size() != h.dim())
    throw std::invalid_argument("h_tail_ratio: scale vector dimension mismatch");
  check_nonneg(c, "h_tail_ratio: scales must be non-negative");
  double csum = 0.0;
  for (double x : c) csum += x;
  if (!(csum > 0.0)) throw std::domain_error("h_tail_ratio: scales must not all be zero");
  const double n = static_cast<double>(c.size());
  double total = 0.0;
  for (std::size_t k = 0; k < h.atoms.size(); ++k) {
    double inner = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
      inner += std::pow(c[i] * h.atoms[k][i], 1.0 / gamma);
    total += h.masses[k] * std::pow(inner, gamma);
  }
  return std::pow(n, 1.0 - gamma) * total / csum;
}

double bonferroni_ratio(const EllSpec& spec, const WeightVector& w) {
  if (w.size() != ell_dim(spec))
    throw std::invalid_argument("bonferroni_ratio: weight dimension mismatch");
  return static_cast<double>(w.size()) / ell_eval(spec, w.values());
}

double power_ratio(const EllSpec& spec, std::span<const double> c) {
  if (c.size() != ell_dim(spec))
    throw std::invalid_argument("power_ratio: scale vector dimension mismatch");
  double sum = 0.0;
  for (double x : c) {
    if (!(x > 0.0)) throw std::domain_error("power_ratio: scales must be positive");
    sum += x;
  }
  return sum / ell_eval(spec, c);
}

std::string to_string(ConvexOrderVerdict v) {
  switch (v) {
    case ConvexOrderVerdict::first_dominates:
      return "first_dominates";
    case ConvexOrderVerdict::second_dominates:
      return "second_dominates";
    case ConvexOrderVerdict::equal:
      return "equal";
    case ConvexOrderVerdict::incomparable:
      return "incomparable";
  }
  return "unknown";
}

ConvexOrderVerdict convex_order_bivariate(const SpectralMeasure& h1,
                                          const SpectralMeasure& h2) {
  if (h1.dim() != 2 || h2.dim() != 2)
    throw std::domain_error("convex_order_bivariate: measures must be bivariate");
  require_valid(h1);
  require_valid(h2);

  // Integrated first-marginal mass D(x) = sum_k m_k (x - theta_1^(k))^+ is
  // piecewise linear and convex; comparing the two at all breakpoints decides
  // the pointwise order.
  std::set<double> grid{0.0, 1.0};
  for (const auto& a : h1.atoms) grid.insert(a[0]);
  for (const auto& a : h2.atoms) grid.insert(a[0]);

  const auto integrated = [](const SpectralMeasure& h, double x) {
    double d = 0.0;
    for (std::size_t k = 0; k < h.atoms.size(); ++k)
      d += h.masses[k] * std::max(0.0, x - h.atoms[k][0]);
    return d;
  };

  constexpr double kTol = 1e-12;
  bool first_above = false;
  bool second_above = false;
  for (double x : grid) {
    const double d1 = integrated(h1, x);
    const double d2 = integrated(h2, x);
    if (d1 > d2 + kTol) first_above = true;
    if (d2 > d1 + kTol) second_above = true;
  }
  if (first_above && second_above) return ConvexOrderVerdict::incomparable;
  if (first_above) return ConvexOrderVerdict::first_dominates;
  if (second_above) return ConvexOrderVerdict::second_dominates;
  return ConvexOrderVerdict::equal;
}

}  // namespace tailfuse
