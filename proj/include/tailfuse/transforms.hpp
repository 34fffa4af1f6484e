#pragma once

#include <span>
#include <string>
#include <vector>

namespace tailfuse {

enum class TransformFamily { pareto, cauchy, trunc_cauchy, trunc_t };

// Parameter bundle describing a transformation distribution. trunc_q is the
// lower truncation probability of the parent distribution.
struct TransformSpec {
  TransformFamily family = TransformFamily::pareto;
  double gamma = 1.0;    // pareto tail index
  double nu = 1.0;       // trunc_t degrees of freedom (also its tail index)
  double trunc_q = 0.0;

  static TransformSpec pareto(double gamma);
  static TransformSpec cauchy();
  static TransformSpec truncated_cauchy(double trunc_q = 0.001);
  static TransformSpec truncated_t(double nu, double trunc_q = 0.001);
};

// A transformation distribution with a regularly varying right tail and
// (except for the untruncated Cauchy reference) a finite left support bound.
class TailTransform {
 public:
  explicit TailTransform(const TransformSpec& spec);

  double tail_index() const { return tail_index_; }
  double left_bound() const { return left_; }

  double cdf(double x) const;
  double survival(double x) const;
  double quantile(double p) const;        // requires 0 < p < 1
  // Q_F(1 - s) evaluated from the survival probability s in (0,1); stable for
  // tiny s where 1 - s would round.
  double upper_quantile(double s) const;

  const TransformSpec& spec() const { return spec_; }
  std::string name() const;

 private:
  TransformSpec spec_;
  double tail_index_ = 1.0;
  double left_ = 0.0;
};

TailTransform make_transform(const TransformSpec& spec);

// Positive weights normalized so they sum to the dimension n.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> w);
  static WeightVector uniform(std::size_t n);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& values() const { return w_; }

  // Absolute deviation of the input sum from n, before renormalization.
  double input_deviation() const { return deviation_; }
  bool was_rescaled() const { return deviation_ > 1e-6; }

 private:
  std::vector<double> w_;
  double deviation_ = 0.0;
};

// Transformed statistic Q_F((1 - p/omega)^+). p = 0 maps to a large finite
// saturation value so that averages stay finite.
double transform_pvalue(const TailTransform& f, double p, double omega);

// The average statistic (1/n) sum_i Q_F((1 - P_i/omega_i)^+).
double average_statistic(const TailTransform& f, std::span<const double> p,
                         const WeightVector& w);

// Combined p-value min(1, n^(1-gamma) * survival(average)). Exactly 0 when
// some P_i is 0.
double combined_pvalue(const TailTransform& f, std::span<const double> p,
                       const WeightVector& w);

// Weighted Bonferroni combined p-value min(1, n min_i P_i/omega_i).
double bonferroni_pvalue(std::span<const double> p, const WeightVector& w);

// Rejection threshold Q_F(1 - alpha/n^(1-gamma)). Throws when the argument
// would leave (0,1), i.e. alpha * n^(gamma-1) >= 1.
double reject_threshold(const TailTransform& f, std::size_t n, double alpha);

bool reject(const TailTransform& f, std::span<const double> p, const WeightVector& w,
            double alpha);

}  // namespace tailfuse
