#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tailfuse/rng.hpp"

namespace tailfuse {

// Correlation matrix with a cached Cholesky factor.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(std::vector<std::vector<double>> entries);
  static CorrelationMatrix equicorrelated(std::size_t n, double rho);

  std::size_t dim() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  // Row-major dense lower-triangular factor L with L L^T = R.
  const std::vector<double>& chol_lower() const { return l_; }

 private:
  std::size_t n_;
  std::vector<double> a_;
  std::vector<double> l_;
};

// Dependence model for the null p-value vector. The model describes the
// copula of the complement (1-P_1, ..., 1-P_n); sampling produces P itself.
class CopulaModel {
 public:
  enum class Kind { independence, comonotone, gaussian, student_t, clayton, mixture };

  static CopulaModel independence(std::size_t n);
  static CopulaModel comonotone(std::size_t n);
  static CopulaModel gaussian(CorrelationMatrix r);
  static CopulaModel student_t(double nu, CorrelationMatrix sigma);
  // Survival Clayton copula for the complement, i.e. P itself follows the
  // Clayton copula with generator index theta > 0.
  static CopulaModel clayton(double theta, std::size_t n);
  static CopulaModel mixture(std::vector<double> weights,
                             std::vector<CopulaModel> components);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return n_; }
  std::string name() const;
  // theta for clayton, common off-diagonal rho for elliptical models, 0/1 for
  // the independence/comonotone corners; used for reporting.
  double dependence_param() const;
  double theta() const { return theta_; }
  double nu() const { return nu_; }
  const CorrelationMatrix& correlation() const;
  const std::vector<double>& mixture_weights() const { return mix_w_; }
  const std::vector<CopulaModel>& mixture_components() const { return *mix_c_; }

 private:
  CopulaModel(Kind kind, std::size_t n) : kind_(kind), n_(n) {}

  Kind kind_;
  std::size_t n_;
  double theta_ = 0.0;
  double nu_ = 0.0;
  std::shared_ptr<const CorrelationMatrix> corr_;
  std::vector<double> mix_w_;
  std::shared_ptr<const std::vector<CopulaModel>> mix_c_;
};

// Scratch buffers reused across draws; one per worker.
struct CopulaWorkspace {
  std::vector<double> z;
  std::vector<double> x;
};

// Draws one null p-value vector. Marginals are standard uniform and the
// copula of (1-P_1, ..., 1-P_n) is the model's copula.
void sample_null_pvalues(const CopulaModel& model, RandomStream& rng,
                         CopulaWorkspace& ws, std::span<double> out);
std::vector<double> sample_null_pvalues(const CopulaModel& model, RandomStream& rng);

enum class TauFamily { clayton, student_t };

// Kendall-tau parameterization maps: clayton theta = 2 tau / (1 - tau),
// elliptical rho = sin(pi tau / 2).
double dependence_from_tau(TauFamily family, double tau);

// Analytic copula CDF of the sampled p-value vector. Supported for
// independence, comonotone, Clayton and mixtures of those.
double copula_cdf(const CopulaModel& model, std::span<const double> u);

// Empirical Kendall tau by inversion counting (O(m log m)). At most
// `cap` leading observations are used.
double kendall_tau(std::span<const double> x, std::span<const double> y,
                   std::size_t cap = 20000);

}  // namespace tailfuse
