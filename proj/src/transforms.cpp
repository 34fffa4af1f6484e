#include "tailfuse/transforms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tailfuse/distributions.hpp"

namespace tailfuse {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Stand-in for Q_F(1) when a p-value is exactly 0. Large enough to dominate
// any statistic, small enough that sums over n stay finite.
constexpr double kSaturation = 1e300;

double cauchy_cdf(double x) { return 0.5 + std::atan(x) / kPi; }
double cauchy_sf(double x) { return 0.5 - std::atan(x) / kPi; }

}  // namespace

TransformSpec TransformSpec::pareto(double gamma) {
  return {TransformFamily::pareto, gamma, 1.0, 0.0};
}

TransformSpec TransformSpec::cauchy() {
  return {TransformFamily::cauchy, 1.0, 1.0, 0.0};
}

TransformSpec TransformSpec::truncated_cauchy(double trunc_q) {
  return {TransformFamily::trunc_cauchy, 1.0, 1.0, trunc_q};
}

TransformSpec TransformSpec::truncated_t(double nu, double trunc_q) {
  return {TransformFamily::trunc_t, 1.0, nu, trunc_q};
}

TailTransform::TailTransform(const TransformSpec& spec) : spec_(spec) {
  switch (spec_.family) {
    case TransformFamily::pareto:
      if (!(spec_.gamma > 0.0))
        throw std::domain_error("TailTransform: pareto tail index must be positive");
      tail_index_ = spec_.gamma;
      left_ = 1.0;
      break;
    case TransformFamily::cauchy:
      tail_index_ = 1.0;
      left_ = -std::numeric_limits<double>::infinity();
      break;
    case TransformFamily::trunc_cauchy:
      if (!(spec_.trunc_q >= 0.0 && spec_.trunc_q < 1.0))
        throw std::domain_error("TailTransform: truncation probability must be in [0,1)");
      tail_index_ = 1.0;
      left_ = spec_.trunc_q > 0.0 ? std::tan(kPi * (spec_.trunc_q - 0.5))
                                  : -std::numeric_limits<double>::infinity();
      break;
    case TransformFamily::trunc_t:
      if (!(spec_.nu > 0.0))
        throw std::domain_error("TailTransform: trunc_t degrees of freedom must be positive");
      if (!(spec_.trunc_q >= 0.0 && spec_.trunc_q < 1.0))
        throw std::domain_error("TailTransform: truncation probability must be in [0,1)");
      tail_index_ = spec_.nu;
      left_ = spec_.trunc_q > 0.0 ? t_quantile(spec_.trunc_q, spec_.nu)
                                  : -std::numeric_limits<double>::infinity();
      break;
  }
}

double TailTransform::cdf(double x) const {
  switch (spec_.family) {
    case TransformFamily::pareto:
      return x <= 1.0 ? 0.0 : 1.0 - std::pow(x, -spec_.gamma);
    case TransformFamily::cauchy:
      return cauchy_cdf(x);
    case TransformFamily::trunc_cauchy: {
      if (x <= left_) return 0.0;
      const double c = (cauchy_cdf(x) - spec_.trunc_q) / (1.0 - spec_.trunc_q);
      return c < 0.0 ? 0.0 : (c > 1.0 ? 1.0 : c);
    }
    case TransformFamily::trunc_t: {
      if (x <= left_) return 0.0;
      const double c = (t_cdf(x, spec_.nu) - spec_.trunc_q) / (1.0 - spec_.trunc_q);
      return c < 0.0 ? 0.0 : (c > 1.0 ? 1.0 : c);
    }
  }
  throw std::logic_error("TailTransform: unknown family");
}

double TailTransform::survival(double x) const {
  switch (spec_.family) {
    case TransformFamily::pareto:
      return x <= 1.0 ? 1.0 : std::pow(x, -spec_.gamma);
    case TransformFamily::cauchy:
      return cauchy_sf(x);
    case TransformFamily::trunc_cauchy: {
      if (x <= left_) return 1.0;
      const double s = cauchy_sf(x) / (1.0 - spec_.trunc_q);
      return s > 1.0 ? 1.0 : s;
    }
    case TransformFamily::trunc_t: {
      if (x <= left_) return 1.0;
      const double s = t_sf(x, spec_.nu) / (1.0 - spec_.trunc_q);
      return s > 1.0 ? 1.0 : s;
    }
  }
  throw std::logic_error("TailTransform: unknown family");
}

double TailTransform::upper_quantile(double s) const {
  switch (spec_.family) {
    case TransformFamily::pareto:
      return std::pow(s, -1.0 / spec_.gamma);
    case TransformFamily::cauchy:
      return std::tan(kPi * (0.5 - s));
    case TransformFamily::trunc_cauchy:
      return std::tan(kPi * (0.5 - s * (1.0 - spec_.trunc_q)));
    case TransformFamily::trunc_t: {
      const double sp = s * (1.0 - spec_.trunc_q);
      if (sp >= 0.5) return -t_quantile_from_sf(1.0 - sp, spec_.nu);
      return t_quantile_from_sf(sp, spec_.nu);
    }
  }
  throw std::logic_error("TailTransform: unknown family");
}

double TailTransform::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("TailTransform::quantile: p must be in (0,1)");
  return upper_quantile(1.0 - p);
}

std::string TailTransform::name() const {
  switch (spec_.family) {
    case TransformFamily::pareto:
      return "pareto";
    case TransformFamily::cauchy:
      return "cauchy";
    case TransformFamily::trunc_cauchy:
      return "trunc_cauchy";
    case TransformFamily::trunc_t:
      return "trunc_t";
  }
  return "unknown";
}

TailTransform make_transform(const TransformSpec& spec) { return TailTransform(spec); }

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw std::invalid_argument("WeightVector: must be non-empty");
  double sum = 0.0;
  for (double v : w_) {
    if (!(v > 0.0)) throw std::domain_error("WeightVector: all weights must be positive");
    sum += v;
  }
  const double n = static_cast<double>(w_.size());
  deviation_ = std::fabs(sum - n);
  const double scale = n / sum;
  for (double& v : w_) v *= scale;
}

WeightVector WeightVector::uniform(std::size_t n) {
  return WeightVector(std::vector<double>(n, 1.0));
}

double transform_pvalue(const TailTransform& f, double p, double omega) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("transform_pvalue: p must be in [0,1]");
  if (!(omega > 0.0)) throw std::domain_error("transform_pvalue: omega must be positive");
  const double s = p / omega;
  if (s >= 1.0) return f.left_bound();
  if (s <= 0.0) return kSaturation;
  return f.upper_quantile(s);
}

double average_statistic(const TailTransform& f, std::span<const double> p,
                         const WeightVector& w) {
  if (p.size() != w.size())
    throw std::invalid_argument("average_statistic: p-value and weight dimensions differ");
  if (p.empty()) throw std::invalid_argument("average_statistic: empty p-value vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += transform_pvalue(f, p[i], w[i]);
  return sum / static_cast<double>(p.size());
}

double combined_pvalue(const TailTransform& f, std::span<const double> p,
                       const WeightVector& w) {
  if (p.size() != w.size())
    throw std::invalid_argument("combined_pvalue: p-value and weight dimensions differ");
  if (p.empty()) throw std::invalid_argument("combined_pvalue: empty p-value vector");
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("combined_pvalue: p-values must be in [0,1]");
    if (v == 0.0) return 0.0;  // limit of the statistic as any p -> 0
  }
  const double n = static_cast<double>(p.size());
  const double xbar = average_statistic(f, p, w);
  const double pc = std::pow(n, 1.0 - f.tail_index()) * f.survival(xbar);
  return pc < 1.0 ? pc : 1.0;
}

double bonferroni_pvalue(std::span<const double> p, const WeightVector& w) {
  if (p.size() != w.size())
    throw std::invalid_argument("bonferroni_pvalue: p-value and weight dimensions differ");
  if (p.empty()) throw std::invalid_argument("bonferroni_pvalue: empty p-value vector");
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw std::domain_error("bonferroni_pvalue: p-values must be in [0,1]");
    m = std::min(m, p[i] / w[i]);
  }
  const double pb = static_cast<double>(p.size()) * m;
  return pb < 1.0 ? pb : 1.0;
}

double reject_threshold(const TailTransform& f, std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("reject_threshold: alpha must be in (0,1)");
  if (n == 0) throw std::invalid_argument("reject_threshold: n must be positive");
  const double s = alpha * std::pow(static_cast<double>(n), f.tail_index() - 1.0);
  if (s >= 1.0)
    throw std::domain_error(
        "reject_threshold: degenerate threshold, alpha/n^(1-gamma) >= 1");
  return f.upper_quantile(s);
}

bool reject(const TailTransform& f, std::span<const double> p, const WeightVector& w,
            double alpha) {
  const double thr = reject_threshold(f, p.size(), alpha);
  return average_statistic(f, p, w) > thr;
}

}  // namespace tailfuse
